"""Deontic-level norms: prohibitions, permissions, compensation, derogation.

Norms live above the formula language. A prohibition forbids a proposition
and may name a compensating proposition; a permission allows one under a
condition. Permissions derogate prohibitions of the same target: where a
permission is in force, the matching prohibition is not.

Two views are provided. ``compile_norms`` turns a norm set into temporal
formulas (maintenance prohibitions via G, permissions via F, compensable
prohibitions via the compensation operator), threading declared overrides
into the antecedents. ``classify_trace`` instead reads the norms directly,
position by position, and reports compliant / weakly-compliant /
non-compliant with per-violation diagnostics. The two views deliberately
disagree on some traces; ``paradox_report`` surfaces that disagreement.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .evaluate import ModelVerdict, UnknownAtom, check_model
from .formula import (
    And,
    Atom,
    Comp,
    Finally,
    Formula,
    Globally,
    Implies,
    Not,
    TrueBool,
    conjoin,
)
from .traces import LassoTrace, TransitionSystem, trace_from_path

__all__ = [
    "Condition",
    "CondTrue",
    "CondLit",
    "CondPermitted",
    "CondAnd",
    "Norm",
    "Prohibition",
    "Permission",
    "NormSet",
    "Conditional",
    "NormSyntaxError",
    "NonStratified",
    "UnsupportedConditionShape",
    "ProhibitionInForce",
    "PermissionInForce",
    "Violation",
    "ComplianceVerdict",
    "ParadoxReport",
    "COMPLIANT",
    "WEAKLY_COMPLIANT",
    "NON_COMPLIANT",
    "parse_norms",
    "compile_norms",
    "apply_overrides",
    "as_conditional",
    "conditional_formula",
    "deontic_in_force",
    "classify_trace",
    "paradox_report",
]

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")

COMPLIANT = "compliant"
WEAKLY_COMPLIANT = "weakly-compliant"
NON_COMPLIANT = "non-compliant"


class NormSyntaxError(ValueError):
    """Malformed norm text; carries the 1-based line when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonStratified(ValueError):
    """Cyclic permitted(...) dependencies between permission targets."""


class UnsupportedConditionShape(ValueError):
    """A condition the formula compilation schema cannot express."""


# --- conditions ---------------------------------------------------------------


@dataclass(frozen=True)
class Condition:
    pass


@dataclass(frozen=True)
class CondTrue(Condition):
    pass


@dataclass(frozen=True)
class CondLit(Condition):
    name: str
    negated: bool = False


@dataclass(frozen=True)
class CondPermitted(Condition):
    target: str


@dataclass(frozen=True)
class CondAnd(Condition):
    left: Condition
    right: Condition


def _condition_literals(cond):
    if isinstance(cond, CondLit):
        yield cond.name
    elif isinstance(cond, CondAnd):
        yield from _condition_literals(cond.left)
        yield from _condition_literals(cond.right)


def _condition_permitted_refs(cond):
    if isinstance(cond, CondPermitted):
        yield cond.target
    elif isinstance(cond, CondAnd):
        yield from _condition_permitted_refs(cond.left)
        yield from _condition_permitted_refs(cond.right)


def _eval_condition(cond, valuation, permitted):
    if isinstance(cond, CondTrue):
        return True
    if isinstance(cond, CondLit):
        holds = cond.name in valuation
        return not holds if cond.negated else holds
    if isinstance(cond, CondPermitted):
        return permitted.get(cond.target, False)
    if isinstance(cond, CondAnd):
        return _eval_condition(cond.left, valuation, permitted) and _eval_condition(
            cond.right, valuation, permitted
        )
    raise TypeError(f"not a condition: {cond!r}")


# --- norms ---------------------------------------------------------------------


@dataclass(frozen=True)
class Norm:
    pass


@dataclass(frozen=True)
class Prohibition(Norm):
    id: str
    target: str
    condition: Condition = CondTrue()
    compensation: str | None = None


@dataclass(frozen=True)
class Permission(Norm):
    id: str
    target: str
    condition: Condition = CondTrue()


class NormSet:
    """An ordered set of norms plus declared overrides.

    Overrides name a permission that wins over a prohibition; they feed the
    antecedent rewriting in ``compile_norms``. Permission conditions may
    refer to other targets through permitted(...); those references must be
    acyclic.
    """

    def __init__(self, norms, overrides=()):
        self.norms = tuple(norms)
        self.overrides = tuple(overrides)
        by_id = {}
        for norm in self.norms:
            if not _IDENT.fullmatch(norm.id):
                raise ValueError(f"invalid norm id {norm.id!r}")
            if norm.id in by_id:
                raise ValueError(f"duplicate norm id {norm.id!r}")
            by_id[norm.id] = norm
        self.by_id = by_id
        for winner, loser in self.overrides:
            if winner not in by_id:
                raise ValueError(f"unknown norm {winner!r} in override")
            if loser not in by_id:
                raise ValueError(f"unknown norm {loser!r} in override")
            if not isinstance(by_id[winner], Permission):
                raise ValueError(f"override winner {winner!r} must be a permission")
            if not isinstance(by_id[loser], Prohibition):
                raise ValueError(f"override loser {loser!r} must be a prohibition")
        self._strata = self._stratify()

    def _stratify(self):
        """Evaluation depth per permission target; cycles are rejected."""
        deps = {}
        for norm in self.norms:
            if isinstance(norm, Permission):
                deps.setdefault(norm.target, set()).update(
                    _condition_permitted_refs(norm.condition)
                )
        depth = {}

        def visit(target, trail):
            if target in depth:
                return depth[target]
            if target in trail:
                cycle = " -> ".join(list(trail) + [target])
                raise NonStratified(f"cyclic permitted(...) dependency: {cycle}")
            if target not in deps:
                return 0
            trail = trail + (target,)
            d = 1 + max((visit(x, trail) for x in deps[target]), default=0)
            depth[target] = d
            return d

        for target in deps:
            visit(target, ())
        return depth

    def permissions_in_order(self):
        """Permissions sorted so that permitted(...) references come first."""
        perms = [(i, n) for i, n in enumerate(self.norms) if isinstance(n, Permission)]
        return [n for _, n in sorted(perms, key=lambda t: (self._strata.get(t[1].target, 0), t[0]))]

    def prohibitions(self):
        return [n for n in self.norms if isinstance(n, Prohibition)]

    def propositions(self) -> tuple[str, ...]:
        """Every proposition the norms read or constrain."""
        names = set()
        for norm in self.norms:
            names.add(norm.target)
            names.update(_condition_literals(norm.condition))
            if isinstance(norm, Prohibition) and norm.compensation:
                names.add(norm.compensation)
        return tuple(sorted(names))

    def winners_of(self, norm_id):
        """Overriding norms for ``norm_id``, in declaration (index) order."""
        ids = [w for w, l in self.overrides if l == norm_id]
        order = {n.id: i for i, n in enumerate(self.norms)}
        return [self.by_id[w] for w in sorted(set(ids), key=lambda w: order[w])]

    def __repr__(self):
        return f"NormSet({[n.id for n in self.norms]}, overrides={list(self.overrides)})"


# --- norm file format ------------------------------------------------------------


def _parse_condition(text, lineno):
    parts = [p.strip() for p in text.split("&")]
    terms = []
    for part in parts:
        if not part:
            raise NormSyntaxError("empty condition term", lineno)
        m = re.fullmatch(r"permitted\(\s*([A-Za-z][A-Za-z0-9_]*)\s*\)", part)
        if m:
            terms.append(CondPermitted(m.group(1)))
            continue
        negated = part.startswith("!")
        name = part[1:].strip() if negated else part
        if not _IDENT.fullmatch(name):
            raise NormSyntaxError(f"bad condition term {part!r}", lineno)
        terms.append(CondLit(name, negated))
    cond = terms[0]
    for term in terms[1:]:
        cond = CondAnd(cond, term)
    return cond


def parse_norms(text: str) -> NormSet:
    """Parse the norm file format.

    Lines: ``norm ID: forbidden P [compensated-by Q] [if COND]``,
    ``norm ID: permitted P [if COND]``, ``override WINNER > LOSER``.
    Conditions are literals (``C``, ``!C``), conjunctions with ``&``, and
    ``permitted(X)`` references. ``#`` starts a comment.
    """
    norms = []
    overrides = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("override"):
            m = re.fullmatch(
                r"override\s+([A-Za-z][A-Za-z0-9_]*)\s*>\s*([A-Za-z][A-Za-z0-9_]*)", line
            )
            if not m:
                raise NormSyntaxError("expected 'override WINNER > LOSER'", lineno)
            overrides.append((m.group(1), m.group(2)))
            continue
        m = re.fullmatch(r"norm\s+([A-Za-z][A-Za-z0-9_]*)\s*:\s*(.*)", line)
        if not m:
            raise NormSyntaxError(f"unrecognised line {line!r}", lineno)
        norm_id, body = m.group(1), m.group(2)
        cond = CondTrue()
        if " if " in body:
            body, cond_text = body.split(" if ", 1)
            cond = _parse_condition(cond_text.strip(), lineno)
        words = body.split()
        if not words:
            raise NormSyntaxError("missing norm body", lineno)
        kind = words[0]
        if kind == "forbidden":
            if len(words) == 2:
                norms.append(Prohibition(norm_id, words[1], cond))
            elif len(words) == 4 and words[2] == "compensated-by":
                norms.append(Prohibition(norm_id, words[1], cond, words[3]))
            else:
                raise NormSyntaxError(
                    "expected 'forbidden P [compensated-by Q]'", lineno
                )
        elif kind == "permitted":
            if len(words) != 2:
                raise NormSyntaxError("expected 'permitted P'", lineno)
            norms.append(Permission(norm_id, words[1], cond))
        else:
            raise NormSyntaxError(f"unknown norm kind {kind!r}", lineno)
        for name in [norms[-1].target, *_condition_literals(cond)]:
            if not _IDENT.fullmatch(name):
                raise NormSyntaxError(f"bad proposition {name!r}", lineno)
    try:
        return NormSet(norms, overrides)
    except NonStratified:
        raise
    except ValueError as exc:
        raise NormSyntaxError(str(exc)) from exc


# --- compilation to formulas --------------------------------------------------------


def _is_pure_literal(cond):
    if isinstance(cond, (CondTrue, CondLit)):
        return True
    if isinstance(cond, CondAnd):
        return _is_pure_literal(cond.left) and _is_pure_literal(cond.right)
    return False


def _compile_condition(cond):
    """Condition as a formula antecedent, or None for the trivial condition.

    Literal conditions compile to themselves. A permitted(X) condition
    compiles to the eventuality that stands for X's permission: F X. Other
    shapes are refused rather than guessed.
    """
    if isinstance(cond, CondTrue):
        return None
    if _is_pure_literal(cond):
        return _literal_formula(cond)
    if isinstance(cond, CondPermitted):
        return Finally(Atom(cond.target))
    raise UnsupportedConditionShape(
        f"cannot compile condition {cond!r}; use literals or a single permitted(X)"
    )


def _literal_formula(cond):
    if isinstance(cond, CondLit):
        atom = Atom(cond.name)
        return Not(atom) if cond.negated else atom
    if isinstance(cond, CondAnd):
        return And(_literal_formula(cond.left), _literal_formula(cond.right))
    raise UnsupportedConditionShape(f"cannot compile condition {cond!r}")


def _negate(f: Formula) -> Formula:
    """Negation with the usual duality for eventualities: !F x becomes G !x."""
    if isinstance(f, Not):
        return f.operand
    if isinstance(f, Finally):
        return Globally(_negate(f.operand))
    if isinstance(f, Globally):
        return Finally(_negate(f.operand))
    return Not(f)


def compile_norms(ns: NormSet) -> list[Formula]:
    """One formula per norm, in declaration order.

    A prohibition becomes a maintenance constraint G !target, or a
    compensable constraint !target (+) compensation. A permission becomes
    the eventuality F target, guarded by its condition. Declared overrides
    add the negated antecedent of each winning permission to the overridden
    prohibition's antecedent; trivial antecedents are dropped.
    """
    out = []
    for norm in ns.norms:
        if isinstance(norm, Prohibition) and not _is_pure_literal(norm.condition):
            raise UnsupportedConditionShape(
                f"prohibition {norm.id!r} needs a pure-literal condition to compile"
            )
        parts = []
        own = _compile_condition(norm.condition)
        if own is not None:
            parts.append(own)
        if isinstance(norm, Prohibition):
            for winner in ns.winners_of(norm.id):
                winner_ant = _compile_condition(winner.condition)
                if winner_ant is None:
                    winner_ant = TrueBool()
                parts.append(_negate(winner_ant))
            if norm.compensation:
                consequent = Comp(Not(Atom(norm.target)), Atom(norm.compensation))
            else:
                consequent = Globally(Not(Atom(norm.target)))
        else:
            consequent = Finally(Atom(norm.target))
        if parts:
            out.append(Implies(conjoin(parts), consequent))
        else:
            out.append(consequent)
    return out


# --- override rewriting over bare conditionals ----------------------------------------


@dataclass(frozen=True)
class Conditional:
    """An antecedent/consequent pair; the trivial antecedent is TrueBool."""

    antecedent: Formula
    consequent: Formula


def as_conditional(f: Formula) -> Conditional:
    """View a formula as a conditional, wrapping non-implications as true -> f."""
    if isinstance(f, Implies):
        return Conditional(f.left, f.right)
    return Conditional(TrueBool(), f)


def conditional_formula(c: Conditional) -> Formula:
    """The formula a conditional denotes; a trivial antecedent is dropped."""
    if isinstance(c.antecedent, TrueBool):
        return c.consequent
    return Implies(c.antecedent, c.consequent)


def apply_overrides(conditionals, overrides) -> list[Conditional]:
    """Add each winner's negated antecedent to its loser's antecedent.

    ``overrides`` is a list of (winner_index, loser_index) pairs into
    ``conditionals``. A loser overridden by several winners collects the
    negations in winner-index order. Winners are left unchanged, negations
    are taken literally, and a trivial loser antecedent is dropped rather
    than kept as a conjunct.
    """
    conditionals = list(conditionals)
    for winner, loser in overrides:
        if not (0 <= winner < len(conditionals) and 0 <= loser < len(conditionals)):
            raise IndexError(f"override ({winner}, {loser}) out of range")
    out = []
    for i, cond in enumerate(conditionals):
        winners = sorted({w for w, l in overrides if l == i})
        if not winners:
            out.append(cond)
            continue
        parts = [] if isinstance(cond.antecedent, TrueBool) else [cond.antecedent]
        parts.extend(Not(conditionals[w].antecedent) for w in winners)
        out.append(Conditional(conjoin(parts), cond.consequent))
    return out


# --- in-force computation and trace classification --------------------------------------


@dataclass(frozen=True)
class ProhibitionInForce:
    norm_id: str


@dataclass(frozen=True)
class PermissionInForce:
    norm_id: str


def deontic_in_force(ns: NormSet, trace: LassoTrace, position: int) -> frozenset:
    """Which prohibitions and permissions are in force at a position.

    Permissions are evaluated in dependency order, so permitted(X) reads
    the already-settled permissions of X. A prohibition is in force when
    its own condition holds and no permission of the same target is in
    force (the permission derogates it).
    """
    if not 0 <= position < trace.num_positions:
        raise ValueError(f"position {position} is not distinguished")
    missing = set(ns.propositions()) - set(trace.props)
    if missing:
        raise UnknownAtom(sorted(missing)[0])
    valuation = trace.valuation(position)
    permitted = {}
    in_force = set()
    for norm in ns.permissions_in_order():
        if _eval_condition(norm.condition, valuation, permitted):
            in_force.add(PermissionInForce(norm.id))
            permitted[norm.target] = True
    for norm in ns.prohibitions():
        if _eval_condition(norm.condition, valuation, permitted) and not permitted.get(
            norm.target, False
        ):
            in_force.add(ProhibitionInForce(norm.id))
    return frozenset(in_force)


@dataclass(frozen=True)
class Violation:
    norm_id: str
    position: int
    compensated: bool
    compensation_position: int | None = None


@dataclass(frozen=True)
class ComplianceVerdict:
    """Per-trace deontic outcome with per-violation diagnostics.

    non-compliant: some violation lacks a compensation.
    weakly-compliant: violations occurred but every one was compensated.
    compliant: no violation at all.
    """

    status: str
    violations: tuple[Violation, ...]
    in_force: tuple[frozenset, ...]


def classify_trace(ns: NormSet, trace: LassoTrace) -> ComplianceVerdict:
    """Classify a trace against the norms, position by position.

    A prohibition in force is violated where its target holds. A violation
    of a compensable prohibition counts as compensated when the
    compensation holds at that position or later; the search covers the
    distinguished positions plus one extra loop traversal, which is
    complete for eventuality searches by periodicity.
    """
    missing = set(ns.propositions()) - set(trace.props)
    if missing:
        raise UnknownAtom(sorted(missing)[0])
    p = len(trace.prefix)
    k = len(trace.loop)
    n = p + k
    violations = []
    log = []
    for i in range(n):
        forces = deontic_in_force(ns, trace, i)
        log.append(forces)
        for norm in ns.prohibitions():
            if ProhibitionInForce(norm.id) not in forces:
                continue
            if norm.target not in trace.valuation(i):
                continue
            compensated = False
            comp_pos = None
            if norm.compensation:
                for m in range(i, p + 2 * k):
                    if norm.compensation in trace.valuation(m):
                        compensated = True
                        comp_pos = m
                        break
            violations.append(Violation(norm.id, i, compensated, comp_pos))
    if any(not v.compensated for v in violations):
        status = NON_COMPLIANT
    elif violations:
        status = WEAKLY_COMPLIANT
    else:
        status = COMPLIANT
    return ComplianceVerdict(status, tuple(violations), tuple(log))


# --- paradox surface -------------------------------------------------------------------


@dataclass(eq=False)
class ParadoxReport:
    """Formula-level and deontic-level verdicts for one scenario, side by side.

    ``discrepancy`` is set when the compiled formulas hold at every state
    while the deontic classification of the given run is non-compliant.
    """

    formulas: tuple[Formula, ...]
    model: dict[str, ModelVerdict]
    ltl_holds: bool
    compliance: ComplianceVerdict
    discrepancy: bool
    bounds_used: tuple[int, int]


def paradox_report(ns: NormSet, ts: TransitionSystem, path, bounds=None) -> ParadoxReport:
    """Check the compiled norms over the system and classify the given run.

    ``path`` is a (prefix state ids, loop state ids) pair valid in ``ts``.
    """
    formulas = tuple(compile_norms(ns))
    model = check_model(ts, formulas, bounds)
    bounds_used = next(iter(model.values())).bounds_used
    prefix_ids, loop_ids = path
    trace = trace_from_path(ts, prefix_ids, loop_ids)
    compliance = classify_trace(ns, trace.with_props(ns.propositions()))
    ltl_holds = all(v.holds for v in model.values())
    return ParadoxReport(
        formulas=formulas,
        model=model,
        ltl_holds=ltl_holds,
        compliance=compliance,
        discrepancy=ltl_holds and compliance.status == NON_COMPLIANT,
        bounds_used=bounds_used,
    )
