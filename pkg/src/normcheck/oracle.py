"""Brute-force ground truth over a bounded trace universe.

Everything here enumerates lasso traces exhaustively and checks claims by
direct evaluation: formula equivalence, satisfiability, and the five-row
compliance table for the bundled privacy scenario. Results are relative to
the enumerated bounds, never theorems, and every report records the bounds
it used.
"""

from __future__ import annotations

from dataclasses import dataclass

from .evaluate import UnknownAtom, eval_on_trace
from .formula import Formula, atoms
from .norms import (
    COMPLIANT,
    NON_COMPLIANT,
    WEAKLY_COMPLIANT,
    NormSet,
    classify_trace,
)
from .traces import LassoTrace, enumerate_valuation_traces, make_props

__all__ = [
    "EquivResult",
    "PatternMismatch",
    "RowCheck",
    "Table1Report",
    "brute_force_equiv",
    "satisfiable_within",
    "reference_privacy_status",
    "table1_check",
    "TABLE1_BOUNDS",
]


@dataclass(frozen=True)
class EquivResult:
    """Outcome of a bounded equivalence check.

    When not equivalent, ``counterexample`` holds the first differing trace
    and the two position-0 truth values, in argument order.
    """

    equivalent: bool
    counterexample: tuple[LassoTrace, tuple[bool, bool]] | None
    bounds: tuple[int, int]


def _check_props(f, props):
    missing = atoms(f) - set(props)
    if missing:
        raise UnknownAtom(sorted(missing)[0])


def brute_force_equiv(
    f: Formula, g: Formula, props, max_prefix: int, max_loop: int
) -> EquivResult:
    """Compare f and g on every lasso trace over ``props`` within bounds."""
    props = make_props(props)
    _check_props(f, props)
    _check_props(g, props)
    for trace in enumerate_valuation_traces(props, max_prefix, max_loop):
        vf = eval_on_trace(f, trace)
        vg = eval_on_trace(g, trace)
        if vf != vg:
            return EquivResult(False, (trace, (vf, vg)), (max_prefix, max_loop))
    return EquivResult(True, None, (max_prefix, max_loop))


def satisfiable_within(
    f: Formula, props, max_prefix: int, max_loop: int
) -> LassoTrace | None:
    """First enumerated trace satisfying f, or None within the bounds."""
    props = make_props(props)
    _check_props(f, props)
    for trace in enumerate_valuation_traces(props, max_prefix, max_loop):
        if eval_on_trace(f, trace):
            return trace
    return None


# --- compliance table over the A/B/C/D universe ----------------------------------

TABLE1_BOUNDS = (3, 1)
_TABLE_PROPS = ("A", "B", "C", "D")


def reference_privacy_status(trace: LassoTrace) -> str:
    """Straight-line reimplementation of the privacy-act reading.

    Kept independent of the norm engine on purpose: collecting A is allowed
    only under C, a lapse is made good by a later B, collecting D is allowed
    only under C and can never be made good. Used to cross-check the general
    classifier.
    """
    p = len(trace.prefix)
    k = len(trace.loop)
    n = p + k
    any_violation = False
    uncompensated = False
    for i in range(n):
        v = trace.valuation(i)
        if "C" in v:
            continue
        if "D" in v:
            any_violation = True
            uncompensated = True
        if "A" in v:
            any_violation = True
            if not any("B" in trace.valuation(m) for m in range(i, p + 2 * k)):
                uncompensated = True
    if uncompensated:
        return NON_COMPLIANT
    return WEAKLY_COMPLIANT if any_violation else COMPLIANT


def _a_lapses(trace):
    return [
        i
        for i in range(trace.num_positions)
        if "C" not in trace.valuation(i) and "A" in trace.valuation(i)
    ]


def _b_at_or_after(trace, i):
    p = len(trace.prefix)
    k = len(trace.loop)
    return any("B" in trace.valuation(m) for m in range(i, p + 2 * k))


def _row_c(trace):
    return all("C" in trace.valuation(i) for i in range(trace.num_positions))


def _row_a_b(trace):
    lapses = _a_lapses(trace)
    if not lapses:
        return False
    for i in range(trace.num_positions):
        v = trace.valuation(i)
        if "A" in v and "C" in v:
            return False
        if "D" in v and "C" not in v:
            return False
    return all(_b_at_or_after(trace, i) for i in lapses)


def _row_a_not_b(trace):
    return any(not _b_at_or_after(trace, i) for i in _a_lapses(trace))


def _row_d(trace):
    return any(
        "C" not in trace.valuation(i) and "D" in trace.valuation(i)
        for i in range(trace.num_positions)
    )


def _row_none(trace):
    return all(
        trace.valuation(i).isdisjoint({"A", "C", "D"})
        for i in range(trace.num_positions)
    )


_ROWS = (
    (
        "C",
        COMPLIANT,
        "a court order holds at every position",
        _row_c,
    ),
    (
        "!C A B",
        WEAKLY_COMPLIANT,
        "A occurs only without C, never alongside D-without-C, and every "
        "such occurrence is followed (or met) by B",
        _row_a_b,
    ),
    (
        "!C A !B",
        NON_COMPLIANT,
        "A occurs without C at some position with no B at or after it",
        _row_a_not_b,
    ),
    (
        "!C D",
        NON_COMPLIANT,
        "D occurs without C at some position",
        _row_d,
    ),
    (
        "!C !A !D",
        COMPLIANT,
        "no position has any of A, C, D",
        _row_none,
    ),
)


class PatternMismatch(AssertionError):
    """A trace matching a row pattern received a different status."""

    def __init__(self, row, expected, observed, trace):
        super().__init__(
            f"row {row!r}: expected {expected}, observed {observed} on {trace!r}"
        )
        self.row = row
        self.expected = expected
        self.observed = observed
        self.trace = trace


@dataclass(frozen=True)
class RowCheck:
    label: str
    expected: str
    description: str
    matched: int
    mismatched: int
    witness: LassoTrace | None
    witness_status: str | None


@dataclass(eq=False)
class Table1Report:
    bounds: tuple[int, int]
    universe_size: int
    rows: tuple[RowCheck, ...]
    crosscheck_disagreements: int
    crosscheck_witness: LassoTrace | None
    ok: bool


def table1_check(ns: NormSet, bounds=TABLE1_BOUNDS, strict: bool = False) -> Table1Report:
    """Classify every trace over A, B, C, D within the bounds and check
    that each row pattern of the compliance table gets exactly its status.

    Rows may overlap for some traces; each row is checked on its own and no
    combination rule is invented. Every trace is also recomputed with the
    independent privacy reading; disagreements with the classifier are
    counted. With ``strict`` the first row mismatch raises PatternMismatch.
    """
    max_prefix, max_loop = bounds
    counts = [0] * len(_ROWS)
    mismatches = [0] * len(_ROWS)
    witnesses: list[LassoTrace | None] = [None] * len(_ROWS)
    witness_status: list[str | None] = [None] * len(_ROWS)
    crosscheck_bad = 0
    crosscheck_witness = None
    universe = 0
    for trace in enumerate_valuation_traces(_TABLE_PROPS, max_prefix, max_loop):
        universe += 1
        wide = trace.with_props(ns.propositions())
        status = classify_trace(ns, wide).status
        if reference_privacy_status(trace) != status:
            crosscheck_bad += 1
            if crosscheck_witness is None:
                crosscheck_witness = trace
        for idx, (label, expected, _desc, predicate) in enumerate(_ROWS):
            if predicate(trace):
                counts[idx] += 1
                if status != expected:
                    if strict:
                        raise PatternMismatch(label, expected, status, trace)
                    mismatches[idx] += 1
                    if witnesses[idx] is None:
                        witnesses[idx] = trace
                        witness_status[idx] = status
    rows = tuple(
        RowCheck(
            label=label,
            expected=expected,
            description=desc,
            matched=counts[idx],
            mismatched=mismatches[idx],
            witness=witnesses[idx],
            witness_status=witness_status[idx],
        )
        for idx, (label, expected, desc, _predicate) in enumerate(_ROWS)
    )
    ok = all(r.mismatched == 0 for r in rows) and crosscheck_bad == 0
    return Table1Report(
        bounds=(max_prefix, max_loop),
        universe_size=universe,
        rows=rows,
        crosscheck_disagreements=crosscheck_bad,
        crosscheck_witness=crosscheck_witness,
        ok=ok,
    )
