import pytest

from normcheck.evaluate import UnknownAtom, eval_on_trace
from normcheck.formula import parse_formula
from normcheck.norms import (
    COMPLIANT,
    NON_COMPLIANT,
    WEAKLY_COMPLIANT,
    CondLit,
    CondPermitted,
    NormSet,
    Permission,
    Prohibition,
    classify_trace,
)
from normcheck.oracle import (
    PatternMismatch,
    brute_force_equiv,
    reference_privacy_status,
    satisfiable_within,
    table1_check,
)
from normcheck.traces import LassoTrace, enumerate_valuation_traces, parse_trace


def _uncompensable_variant():
    """The bundled norms minus the compensation clause; its classifier can
    never call a lapse of A weakly compliant, so the table must mismatch."""
    return NormSet(
        [
            Prohibition("prohA", "A"),
            Permission("permA", "A", CondLit("C")),
            Prohibition("prohD", "D"),
            Permission("permD", "D", CondPermitted("A")),
        ],
        overrides=[("permA", "prohA"), ("permD", "prohD")],
    )


class TestBruteForceEquiv:
    def test_eventually_until_identity(self):
        result = brute_force_equiv(
            parse_formula("F a"), parse_formula("true U a"), ["a"], 3, 2
        )
        assert result.equivalent
        assert result.counterexample is None
        assert result.bounds == (3, 2)

    def test_always_versus_eventually(self):
        result = brute_force_equiv(
            parse_formula("G a"), parse_formula("F a"), ["a"], 3, 2
        )
        assert not result.equivalent
        trace, (vf, vg) = result.counterexample
        # First differing trace in enumeration order: the loop where a
        # holds only at the second position.
        assert trace == LassoTrace(("a",), (), (frozenset(), frozenset({"a"})))
        assert (vf, vg) == (False, True)

    def test_counterexample_reproducible(self):
        f = parse_formula("a U b")
        g = parse_formula("a W b")
        result = brute_force_equiv(f, g, ["a", "b"], 2, 2)
        assert not result.equivalent
        trace, (vf, vg) = result.counterexample
        assert eval_on_trace(f, trace) == vf
        assert eval_on_trace(g, trace) == vg
        assert vf != vg

    def test_compensation_expansion_oracle(self):
        result = brute_force_equiv(
            parse_formula("!a (+) b"),
            parse_formula("G !a | F (a & F b)"),
            ["a", "b"],
            3,
            3,
        )
        assert result.equivalent

    def test_atoms_must_be_declared(self):
        with pytest.raises(UnknownAtom):
            brute_force_equiv(parse_formula("a"), parse_formula("b"), ["a"], 1, 1)


class TestSatisfiableWithin:
    def test_contradictory_guard_pairs(self):
        assert satisfiable_within(parse_formula("G !A & F A"), ["A"], 3, 3) is None
        assert satisfiable_within(parse_formula("G !D & F D"), ["D"], 3, 3) is None

    def test_plain_eventuality(self):
        witness = satisfiable_within(parse_formula("F A"), ["A"], 3, 3)
        assert witness == LassoTrace(("A",), (), (frozenset({"A"}),))
        assert eval_on_trace(parse_formula("F A"), witness)

    def test_unsatisfiable_within_small_bounds_only(self):
        # Needs three consecutive steps; no room with an empty prefix and a
        # one-position loop.
        f = parse_formula("a & X (!a & X a) & X X X G !a")
        assert satisfiable_within(f, ["a"], 0, 1) is None
        assert satisfiable_within(f, ["a"], 3, 1) is not None


class TestReferencePrivacyStatus:
    def test_matches_classifier_on_sampled_universe(self, privacy):
        _, ns, _ = privacy
        traces = list(enumerate_valuation_traces("ABCD", 1, 1))
        for trace in traces:
            wide = trace.with_props(ns.propositions())
            assert reference_privacy_status(trace) == classify_trace(ns, wide).status

    def test_hand_picked_rows(self):
        assert reference_privacy_status(parse_trace("loop: {C}", props="ABCD")) == COMPLIANT
        assert (
            reference_privacy_status(
                parse_trace("prefix: {A} {B} ; loop: {}", props="ABCD")
            )
            == WEAKLY_COMPLIANT
        )
        assert (
            reference_privacy_status(parse_trace("prefix: {A} ; loop: {}", props="ABCD"))
            == NON_COMPLIANT
        )
        assert (
            reference_privacy_status(parse_trace("loop: {D}", props="ABCD"))
            == NON_COMPLIANT
        )


class TestTable1:
    def test_small_universe_all_rows_clean(self, privacy):
        _, ns, _ = privacy
        report = table1_check(ns, bounds=(1, 1))
        assert report.ok
        assert report.universe_size == 16 + 256
        assert [r.expected for r in report.rows] == [
            COMPLIANT,
            WEAKLY_COMPLIANT,
            NON_COMPLIANT,
            NON_COMPLIANT,
            COMPLIANT,
        ]
        for row in report.rows:
            assert row.mismatched == 0
            assert row.witness is None
            assert row.matched > 0
        assert report.crosscheck_disagreements == 0

    def test_row_membership_examples(self, privacy):
        _, ns, _ = privacy
        report = table1_check(ns, bounds=(1, 1))
        by_label = {r.label: r for r in report.rows}
        # Count checks for rows with closed-form sizes: C everywhere leaves
        # the other three propositions free, the all-clear row leaves only B.
        assert by_label["C"].matched == 8 + 64
        assert by_label["!C !A !D"].matched == 2 + 4

    def test_strict_mode_raises_on_planted_mismatch(self):
        with pytest.raises(PatternMismatch):
            table1_check(_uncompensable_variant(), bounds=(1, 1), strict=True)

    def test_nonstrict_reports_mismatch_witness(self):
        report = table1_check(_uncompensable_variant(), bounds=(1, 1))
        assert not report.ok
        weak_row = report.rows[1]
        assert weak_row.mismatched > 0
        assert weak_row.witness is not None
        assert weak_row.witness_status == NON_COMPLIANT
