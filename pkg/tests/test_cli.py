import json

import pytest

from normcheck.bundled import privacy_norms_text, privacy_ts_text
from normcheck.cli import run

PAPER_TRACE = "prefix: {} {A,D} {B} ; loop: {}"

NAIVE_CONDITIONALS = """\
G !A
G !A & A -> G B
C -> F A
G !D
F A -> F D
"""

NAIVE_OVERRIDES = """\
3 > 1
5 > 4
"""


@pytest.fixture
def privacy_files(tmp_path):
    ts = tmp_path / "privacy.ts"
    ts.write_text(privacy_ts_text())
    norms = tmp_path / "privacy.norms"
    norms.write_text(privacy_norms_text())
    return str(ts), str(norms)


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEval:
    def test_true_formula(self, capsys):
        code, out, _ = invoke(
            capsys, "eval", "--formula", "G !a", "--trace", "loop: {}"
        )
        assert code == 0
        assert out == "true\n"

    def test_false_formula(self, capsys):
        code, out, _ = invoke(
            capsys, "eval", "--formula", "G !a", "--trace", "prefix: {a} ; loop: {}"
        )
        assert code == 1
        assert out == "false\n"

    def test_trace_file(self, capsys, tmp_path):
        path = tmp_path / "t.trace"
        path.write_text("loop: {a}\n")
        code, out, _ = invoke(
            capsys, "eval", "--formula", "F a", "--trace-file", str(path)
        )
        assert code == 0

    def test_structured(self, capsys):
        code, out, _ = invoke(
            capsys,
            "eval",
            "--formula",
            "F a",
            "--trace",
            "loop: {a}",
            "--format",
            "structured",
        )
        record = json.loads(out)
        assert record == {"record": "eval", "formula": "F a", "value": True}

    def test_syntax_error_is_input_error(self, capsys):
        code, _, err = invoke(
            capsys, "eval", "--formula", "G !", "--trace", "loop: {}"
        )
        assert code == 2
        assert "error:" in err


class TestCheck:
    def test_scenario_satisfied(self, capsys, privacy_files):
        ts, norms = privacy_files
        code, out, _ = invoke(
            capsys, "check", "--ts", ts, "--norms", norms, "--bounds", "4,4"
        )
        assert code == 0
        for state in ("t0", "t1", "t2", "tl"):
            assert f"{state}: holds" in out
        assert "prohA" in out

    def test_single_state(self, capsys, privacy_files):
        ts, norms = privacy_files
        code, out, _ = invoke(
            capsys, "check", "--ts", ts, "--norms", norms, "--state", "t1"
        )
        assert code == 0
        assert out.count(": holds") == 1

    def test_failing_formula_file(self, capsys, privacy_files, tmp_path):
        ts, _ = privacy_files
        formulas = tmp_path / "formulas.txt"
        formulas.write_text("G !A\nF B\n")
        code, out, _ = invoke(capsys, "check", "--ts", ts, "--formulas", str(formulas))
        assert code == 1
        assert "FAILS" in out
        assert "counterexample:" in out

    def test_structured_records(self, capsys, privacy_files):
        ts, norms = privacy_files
        code, out, _ = invoke(
            capsys,
            "check",
            "--ts",
            ts,
            "--norms",
            norms,
            "--format",
            "structured",
        )
        records = [json.loads(line) for line in out.splitlines()]
        assert len(records) == 4
        assert all(r["record"] == "state" for r in records)
        assert all(r["holds"] for r in records)
        assert [f["label"] for f in records[0]["formulas"]] == [
            "prohA",
            "permA",
            "prohD",
            "permD",
        ]

    def test_insufficient_bounds_is_input_error(self, capsys, privacy_files):
        ts, norms = privacy_files
        code, _, err = invoke(
            capsys, "check", "--ts", ts, "--norms", norms, "--bounds", "1,1"
        )
        assert code == 2
        assert "no lasso" in err

    def test_missing_file(self, capsys, privacy_files):
        _, norms = privacy_files
        code, _, err = invoke(capsys, "check", "--ts", "/nonexistent.ts", "--norms", norms)
        assert code == 2


class TestClassify:
    def test_scenario_run(self, capsys, privacy_files):
        _, norms = privacy_files
        code, out, _ = invoke(
            capsys, "classify", "--trace", PAPER_TRACE, "--norms", norms
        )
        assert code == 1
        assert "status: non-compliant" in out
        assert "prohD at position 1: uncompensated" in out
        assert "prohA at position 1: compensated at position 2" in out

    def test_compliant_run_exit_zero(self, capsys, privacy_files):
        _, norms = privacy_files
        code, out, _ = invoke(
            capsys, "classify", "--trace", "loop: {C}", "--norms", norms
        )
        assert code == 0
        assert "status: compliant" in out
        assert "violations: none" in out

    def test_weakly_compliant_exit_one(self, capsys, privacy_files):
        _, norms = privacy_files
        code, out, _ = invoke(
            capsys,
            "classify",
            "--trace",
            "prefix: {} {A} {B} ; loop: {}",
            "--norms",
            norms,
        )
        assert code == 1
        assert "status: weakly-compliant" in out

    def test_structured(self, capsys, privacy_files):
        _, norms = privacy_files
        code, out, _ = invoke(
            capsys,
            "classify",
            "--trace",
            PAPER_TRACE,
            "--norms",
            norms,
            "--format",
            "structured",
        )
        records = [json.loads(line) for line in out.splitlines()]
        assert records[0]["record"] == "classification"
        assert records[0]["status"] == "non-compliant"
        violations = [r for r in records if r["record"] == "violation"]
        assert {
            "record": "violation",
            "norm": "prohD",
            "position": 1,
            "compensated": False,
            "compensation_position": None,
        } in violations


class TestRewrite:
    def test_naive_set_rewritten(self, capsys, tmp_path):
        conditionals = tmp_path / "conditionals.txt"
        conditionals.write_text(NAIVE_CONDITIONALS)
        overrides = tmp_path / "overrides.txt"
        overrides.write_text(NAIVE_OVERRIDES)
        code, out, _ = invoke(
            capsys,
            "rewrite",
            "--conditionals",
            str(conditionals),
            "--overrides",
            str(overrides),
        )
        assert code == 0
        assert out.splitlines() == [
            "!C -> G !A",
            "G !A & A -> G B",
            "C -> F A",
            "!F A -> G !D",
            "F A -> F D",
        ]

    def test_out_of_range_override(self, capsys, tmp_path):
        conditionals = tmp_path / "conditionals.txt"
        conditionals.write_text("G !A\n")
        overrides = tmp_path / "overrides.txt"
        overrides.write_text("2 > 1\n")
        code, _, err = invoke(
            capsys,
            "rewrite",
            "--conditionals",
            str(conditionals),
            "--overrides",
            str(overrides),
        )
        assert code == 2


class TestOracle:
    def test_equiv_yes(self, capsys):
        code, out, _ = invoke(
            capsys,
            "oracle",
            "equiv",
            "--f",
            "F a",
            "--g",
            "true U a",
            "--props",
            "a",
            "--bounds",
            "3,2",
        )
        assert code == 0
        assert out.startswith("equivalent: yes")

    def test_equiv_no_shows_counterexample(self, capsys):
        code, out, _ = invoke(
            capsys,
            "oracle",
            "equiv",
            "--f",
            "G a",
            "--g",
            "F a",
            "--props",
            "a",
        )
        assert code == 1
        assert "equivalent: no" in out
        assert "counterexample:" in out

    def test_sat_witness(self, capsys):
        code, out, _ = invoke(
            capsys, "oracle", "sat", "--f", "F A", "--props", "A"
        )
        assert code == 0
        assert "witness: prefix: ; loop: {A}" in out

    def test_sat_none(self, capsys):
        code, out, _ = invoke(
            capsys, "oracle", "sat", "--f", "G !A & F A", "--props", "A", "--bounds", "3,3"
        )
        assert code == 1
        assert "satisfiable: no" in out

    def test_table1_bundled_default(self, capsys):
        code, out, _ = invoke(capsys, "oracle", "table1")
        assert code == 0
        assert "result: PASS" in out
        assert "cross-check disagreements: 0 of 69904" in out


class TestDemo:
    def test_paradox(self, capsys):
        code, out, _ = invoke(capsys, "demo", "paradox")
        assert code == 1
        assert "DISCREPANCY: yes" in out
        assert "status: non-compliant" in out
        assert "satisfied at every state" in out

    def test_paradox_deterministic_output(self, capsys):
        _, first, _ = invoke(capsys, "demo", "paradox")
        _, second, _ = invoke(capsys, "demo", "paradox")
        assert first == second

    def test_paradox_structured(self, capsys):
        code, out, _ = invoke(capsys, "demo", "paradox", "--format", "structured")
        records = [json.loads(line) for line in out.splitlines()]
        kinds = [r["record"] for r in records]
        assert kinds == ["formulas", "model", "classification", "paradox"]
        assert records[-1] == {"record": "paradox", "discrepancy": True}


class TestUsageErrors:
    def test_no_subcommand(self, capsys):
        assert run([]) == 2

    def test_unknown_flag(self, capsys):
        assert run(["eval", "--formula", "a", "--nope"]) == 2

    def test_bad_bounds_format(self, capsys, privacy_files):
        ts, norms = privacy_files
        code, _, _ = invoke(
            capsys, "check", "--ts", ts, "--norms", norms, "--bounds", "four"
        )
        assert code == 2
