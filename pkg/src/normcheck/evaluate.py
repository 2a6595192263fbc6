"""Truth of formulas on lasso traces, and bounded all-paths checking.

Truth values are computed exactly on the distinguished positions of a
trace. Temporal operators are solved on the loop block first (a walk of at
most one full cycle decides until/eventually/always there, since subformula
truth is periodic on the loop) and then propagated backwards through the
prefix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .formula import (
    And,
    Atom,
    Comp,
    FalseBool,
    Finally,
    Formula,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    TrueBool,
    Until,
    WeakUntil,
    subformulas,
)
from .traces import LassoTrace, TransitionSystem, enumerate_lassos

__all__ = [
    "UnknownAtom",
    "EmptyEnumeration",
    "Labeling",
    "ModelVerdict",
    "label_trace",
    "eval_on_trace",
    "eval_at",
    "eval_comp_direct",
    "check_state",
    "check_model",
]


class UnknownAtom(ValueError):
    """A formula proposition that the trace's proposition set lacks."""

    def __init__(self, name):
        super().__init__(f"unknown proposition {name!r}")
        self.name = name


class EmptyEnumeration(RuntimeError):
    """No lasso exists within the given bounds; the bounds are too small."""

    def __init__(self, state, bounds):
        super().__init__(
            f"no lasso from state {state!r} within bounds "
            f"(prefix {bounds[0]}, loop {bounds[1]}); increase the bounds"
        )
        self.state = state
        self.bounds = bounds


@lru_cache(maxsize=1024)
def _plan(f: Formula):
    """Post-order node list plus per-node instructions (tag, child indices)."""
    nodes = tuple(subformulas(f))
    index = {n: i for i, n in enumerate(nodes)}
    steps = []
    for n in nodes:
        if isinstance(n, Atom):
            steps.append(("atom", n.name))
        elif isinstance(n, TrueBool):
            steps.append(("true",))
        elif isinstance(n, FalseBool):
            steps.append(("false",))
        elif isinstance(n, Not):
            steps.append(("not", index[n.operand]))
        elif isinstance(n, Next):
            steps.append(("next", index[n.operand]))
        elif isinstance(n, Finally):
            steps.append(("finally", index[n.operand]))
        elif isinstance(n, Globally):
            steps.append(("globally", index[n.operand]))
        elif isinstance(n, And):
            steps.append(("and", index[n.left], index[n.right]))
        elif isinstance(n, Or):
            steps.append(("or", index[n.left], index[n.right]))
        elif isinstance(n, Implies):
            steps.append(("implies", index[n.left], index[n.right]))
        elif isinstance(n, Until):
            steps.append(("until", index[n.left], index[n.right]))
        elif isinstance(n, WeakUntil):
            steps.append(("weakuntil", index[n.left], index[n.right]))
        elif isinstance(n, Comp):
            steps.append(("comp", index[n.left], index[n.right]))
        else:
            raise TypeError(f"not a formula: {n!r}")
    return nodes, tuple(steps)


def _until_vec(gv, hv, p, k):
    """Truth of g U h at every distinguished position.

    On the loop, walking one full cycle from a position decides the value:
    either h is reached with g holding on the way, or it never will be.
    """
    n = p + k
    vec = [False] * n
    for i in range(p, n):
        value = False
        for d in range(k):
            j = p + (i - p + d) % k
            if hv[j]:
                value = True
                break
            if not gv[j]:
                break
        vec[i] = value
    for i in range(p - 1, -1, -1):
        vec[i] = hv[i] or (gv[i] and vec[i + 1])
    return vec


def _finally_vec(gv, p, k):
    loop_any = any(gv[p:])
    vec = [False] * p + [loop_any] * k
    for i in range(p - 1, -1, -1):
        vec[i] = gv[i] or vec[i + 1]
    return vec


def _globally_vec(gv, p, k):
    loop_all = all(gv[p:])
    vec = [False] * p + [loop_all] * k
    for i in range(p - 1, -1, -1):
        vec[i] = gv[i] and vec[i + 1]
    return vec


def _vectors(f: Formula, trace: LassoTrace):
    nodes, steps = _plan(f)
    prop_set = set(trace.props)
    for step in steps:
        if step[0] == "atom" and step[1] not in prop_set:
            raise UnknownAtom(step[1])
    p = len(trace.prefix)
    k = len(trace.loop)
    n = p + k
    vals = list(trace.prefix) + list(trace.loop)
    out = []
    for step in steps:
        tag = step[0]
        if tag == "atom":
            name = step[1]
            vec = [name in vals[i] for i in range(n)]
        elif tag == "true":
            vec = [True] * n
        elif tag == "false":
            vec = [False] * n
        elif tag == "not":
            child = out[step[1]]
            vec = [not x for x in child]
        elif tag == "next":
            child = out[step[1]]
            vec = [child[i + 1] for i in range(n - 1)] + [child[p]]
        elif tag == "and":
            a, b = out[step[1]], out[step[2]]
            vec = [x and y for x, y in zip(a, b)]
        elif tag == "or":
            a, b = out[step[1]], out[step[2]]
            vec = [x or y for x, y in zip(a, b)]
        elif tag == "implies":
            a, b = out[step[1]], out[step[2]]
            vec = [(not x) or y for x, y in zip(a, b)]
        elif tag == "until":
            vec = _until_vec(out[step[1]], out[step[2]], p, k)
        elif tag == "finally":
            vec = _finally_vec(out[step[1]], p, k)
        elif tag == "globally":
            vec = _globally_vec(out[step[1]], p, k)
        elif tag == "weakuntil":
            u = _until_vec(out[step[1]], out[step[2]], p, k)
            g = _globally_vec(out[step[1]], p, k)
            vec = [x or y for x, y in zip(u, g)]
        elif tag == "comp":
            held, lapse_src = out[step[1]], out[step[2]]
            always_held = _globally_vec(held, p, k)
            eventually_comp = _finally_vec(lapse_src, p, k)
            lapse_compensated = [
                (not held[i]) and eventually_comp[i] for i in range(n)
            ]
            some_lapse_compensated = _finally_vec(lapse_compensated, p, k)
            vec = [x or y for x, y in zip(always_held, some_lapse_compensated)]
        out.append(vec)
    return nodes, out


@dataclass(frozen=True, eq=False)
class Labeling:
    """Truth of every subformula at every distinguished position."""

    subformulas: tuple[Formula, ...]
    num_positions: int
    table: dict

    def value(self, subformula_index: int, position: int) -> bool:
        return self.table[(subformula_index, position)]

    def of(self, sub: Formula, position: int) -> bool:
        return self.table[(self.subformulas.index(sub), position)]


def label_trace(f: Formula, trace: LassoTrace) -> Labeling:
    nodes, out = _vectors(f, trace)
    n = trace.num_positions
    table = {}
    for i, vec in enumerate(out):
        for pos in range(n):
            table[(i, pos)] = vec[pos]
    return Labeling(nodes, n, table)


def eval_on_trace(f: Formula, trace: LassoTrace) -> bool:
    """Truth of f at position 0 of the trace."""
    return _vectors(f, trace)[1][-1][0]


def eval_at(f: Formula, trace: LassoTrace, position: int) -> bool:
    """Truth of f at an arbitrary position (mapped into the loop if needed)."""
    return _vectors(f, trace)[1][-1][trace.distinguished(position)]


def eval_comp_direct(f: Formula, g: Formula, trace: LassoTrace) -> bool:
    """The compensation condition applied literally, at position 0.

    True when f holds at every position, or when some position j has !f and
    some position at or after j has g. Periodicity bounds the searches: j
    ranges over the distinguished positions and the g-search over one extra
    loop traversal.
    """
    fv = _vectors(f, trace)[1][-1]
    gv = _vectors(g, trace)[1][-1]
    p = len(trace.prefix)
    k = len(trace.loop)
    n = p + k
    if all(fv):
        return True
    for j in range(n):
        if not fv[j] and any(gv[trace.distinguished(m)] for m in range(j, p + 2 * k)):
            return True
    return False


@dataclass(frozen=True)
class ModelVerdict:
    """Outcome of bounded all-paths checking from one state.

    ``exhaustive`` is True only when every lasso within the bounds was
    enumerated and the bounds are at least (number of states, number of
    states); it does not claim full automata-based completeness.
    ``per_formula`` carries one verdict per input formula when the check
    was run over a formula list.
    """

    holds: bool
    bounds_used: tuple[int, int]
    counterexample: LassoTrace | None
    exhaustive: bool
    per_formula: tuple["ModelVerdict", ...] | None = None


def _resolve_bounds(ts, bounds):
    if bounds is None:
        return (len(ts.states), len(ts.states))
    return (int(bounds[0]), int(bounds[1]))


def check_state(ts: TransitionSystem, state, f: Formula, bounds=None) -> ModelVerdict:
    """Does f hold on every lasso from ``state`` within the bounds?

    The first falsifying lasso, in enumeration order, becomes the
    counterexample. Raises EmptyEnumeration when the bounds admit no lasso
    at all (distinct from the formula holding vacuously).
    """
    max_prefix, max_loop = _resolve_bounds(ts, bounds)
    exhaustive = max_prefix >= len(ts.states) and max_loop >= len(ts.states)
    seen = False
    counterexample = None
    for tr in enumerate_lassos(ts, state, max_prefix, max_loop):
        seen = True
        if not eval_on_trace(f, tr):
            counterexample = tr
            break
    if not seen:
        raise EmptyEnumeration(state, (max_prefix, max_loop))
    return ModelVerdict(
        holds=counterexample is None,
        bounds_used=(max_prefix, max_loop),
        counterexample=counterexample,
        exhaustive=exhaustive,
    )


def check_model(ts: TransitionSystem, formulas, bounds=None) -> dict[str, ModelVerdict]:
    """Check the conjunction of ``formulas`` at every state.

    Each state's verdict covers the conjunction and carries a per-formula
    breakdown in the same formula order.
    """
    formulas = list(formulas)
    if not formulas:
        raise ValueError("no formulas to check")
    max_prefix, max_loop = _resolve_bounds(ts, bounds)
    exhaustive = max_prefix >= len(ts.states) and max_loop >= len(ts.states)
    result = {}
    for state in ts.states:
        seen = False
        conj_cex = None
        per_cex = [None] * len(formulas)
        for tr in enumerate_lassos(ts, state, max_prefix, max_loop):
            seen = True
            values = [eval_on_trace(fm, tr) for fm in formulas]
            for i, v in enumerate(values):
                if not v and per_cex[i] is None:
                    per_cex[i] = tr
            if conj_cex is None and not all(values):
                conj_cex = tr
        if not seen:
            raise EmptyEnumeration(state, (max_prefix, max_loop))
        per = tuple(
            ModelVerdict(
                holds=cex is None,
                bounds_used=(max_prefix, max_loop),
                counterexample=cex,
                exhaustive=exhaustive,
            )
            for cex in per_cex
        )
        result[state] = ModelVerdict(
            holds=conj_cex is None,
            bounds_used=(max_prefix, max_loop),
            counterexample=conj_cex,
            exhaustive=exhaustive,
            per_formula=per,
        )
    return result
