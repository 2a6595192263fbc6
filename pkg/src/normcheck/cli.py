"""Command-line interface.

Subcommands: eval, check, classify, rewrite, oracle (equiv | sat | table1)
and demo paradox. Exit codes: 0 for a positive verdict, 1 for a negative
verdict or a found violation, 2 for usage or input errors. Output is
deterministic; ``--format structured`` emits line-delimited JSON records
with a stable field order.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bundled import PRIVACY_RUN, privacy_norms, privacy_ts
from .evaluate import EmptyEnumeration, check_model, eval_on_trace
from .formula import atoms, parse_formula, render
from .norms import (
    COMPLIANT,
    PermissionInForce,
    ProhibitionInForce,
    apply_overrides,
    as_conditional,
    classify_trace,
    compile_norms,
    conditional_formula,
    paradox_report,
    parse_norms,
)
from .oracle import brute_force_equiv, satisfiable_within, table1_check
from .traces import format_trace, parse_trace, parse_ts

__all__ = ["run", "main"]


def _parse_bounds(text):
    try:
        p, l = text.split(",")
        return (int(p), int(l))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected bounds as 'P,L' (got {text!r})"
        ) from None


def _parse_props(text):
    return [p.strip() for p in text.split(",") if p.strip()]


def _read_file(path):
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="normcheck",
        description="Check traces and transition systems against temporal norm sets.",
    )
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument(
        "--format",
        choices=("text", "structured"),
        default="text",
        help="output rendering (structured = line-delimited JSON)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser(
        "eval", parents=[fmt], help="evaluate a formula on a trace literal"
    )
    p_eval.add_argument("--formula", required=True)
    group = p_eval.add_mutually_exclusive_group(required=True)
    group.add_argument("--trace", help="trace literal, valuation form")
    group.add_argument("--trace-file", help="file containing a trace literal")
    p_eval.set_defaults(func=_cmd_eval)

    p_check = sub.add_parser(
        "check", parents=[fmt], help="check formulas on all paths of a transition system"
    )
    p_check.add_argument("--ts", required=True, help="transition system file")
    group = p_check.add_mutually_exclusive_group(required=True)
    group.add_argument("--formulas", help="file with one formula per line")
    group.add_argument("--norms", help="norm file; norms are compiled to formulas")
    p_check.add_argument("--state", help="check a single state instead of all")
    p_check.add_argument(
        "--bounds",
        type=_parse_bounds,
        help="enumeration bounds 'P,L'; default is the state count for both",
    )
    p_check.set_defaults(func=_cmd_check)

    p_classify = sub.add_parser(
        "classify", parents=[fmt], help="deontic classification of a trace"
    )
    group = p_classify.add_mutually_exclusive_group(required=True)
    group.add_argument("--trace", help="trace literal, valuation form")
    group.add_argument("--trace-file", help="file containing a trace literal")
    p_classify.add_argument("--norms", required=True, help="norm file")
    p_classify.set_defaults(func=_cmd_classify)

    p_rewrite = sub.add_parser(
        "rewrite", parents=[fmt], help="apply overrides to a list of conditionals"
    )
    p_rewrite.add_argument(
        "--conditionals", required=True, help="file with one formula per line"
    )
    p_rewrite.add_argument(
        "--overrides",
        required=True,
        help="file with lines 'WINNER > LOSER' (1-based line numbers)",
    )
    p_rewrite.set_defaults(func=_cmd_rewrite)

    p_oracle = sub.add_parser("oracle", help="brute-force checks over bounded traces")
    oracle_sub = p_oracle.add_subparsers(dest="oracle_command", required=True)

    p_equiv = oracle_sub.add_parser(
        "equiv", parents=[fmt], help="bounded equivalence of two formulas"
    )
    p_equiv.add_argument("--f", required=True)
    p_equiv.add_argument("--g", required=True)
    p_equiv.add_argument("--props", required=True, type=_parse_props)
    p_equiv.add_argument("--bounds", type=_parse_bounds, default=(3, 2))
    p_equiv.set_defaults(func=_cmd_equiv)

    p_sat = oracle_sub.add_parser(
        "sat", parents=[fmt], help="bounded satisfiability of a formula"
    )
    p_sat.add_argument("--f", required=True)
    p_sat.add_argument("--props", required=True, type=_parse_props)
    p_sat.add_argument("--bounds", type=_parse_bounds, default=(3, 2))
    p_sat.set_defaults(func=_cmd_sat)

    p_table = oracle_sub.add_parser(
        "table1", parents=[fmt], help="check the five-row compliance table"
    )
    p_table.add_argument("--norms", help="norm file; default is the bundled set")
    p_table.set_defaults(func=_cmd_table1)

    p_demo = sub.add_parser("demo", help="bundled demonstrations")
    demo_sub = p_demo.add_subparsers(dest="demo_command", required=True)
    p_paradox = demo_sub.add_parser(
        "paradox",
        parents=[fmt],
        help="bundled scenario where the formula check and the deontic "
        "classification disagree",
    )
    p_paradox.set_defaults(func=_cmd_demo_paradox)

    return parser


def _emit(records, lines, structured):
    if structured:
        for record in records:
            print(json.dumps(record))
    else:
        for line in lines:
            print(line)


def _trace_argument(args, norm_props=()):
    text = args.trace if args.trace is not None else _read_file(args.trace_file)
    trace = parse_trace(text)
    # Closed world: propositions the formulas mention but the literal does
    # not are simply false everywhere.
    return trace.with_props(norm_props)


def _cmd_eval(args):
    f = parse_formula(args.formula)
    trace = _trace_argument(args, atoms(f))
    value = eval_on_trace(f, trace)
    _emit(
        [{"record": "eval", "formula": render(f), "value": value}],
        ["true" if value else "false"],
        args.format == "structured",
    )
    return 0 if value else 1


def _load_check_formulas(args):
    if args.norms:
        ns = parse_norms(_read_file(args.norms))
        formulas = compile_norms(ns)
        labels = [n.id for n in ns.norms]
    else:
        formulas = []
        labels = []
        for lineno, raw in enumerate(_read_file(args.formulas).splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            formulas.append(parse_formula(line))
            labels.append(str(lineno))
    if not formulas:
        raise ValueError("no formulas to check")
    return formulas, labels


def _cmd_check(args):
    ts = parse_ts(_read_file(args.ts))
    formulas, labels = _load_check_formulas(args)
    states = [args.state] if args.state else list(ts.states)
    if args.state and args.state not in ts.labels:
        raise ValueError(f"unknown state {args.state!r}")
    verdicts = check_model(ts, formulas, args.bounds)
    records = []
    lines = []
    all_hold = True
    for state in states:
        verdict = verdicts[state]
        all_hold = all_hold and verdict.holds
        flag = "holds" if verdict.holds else "FAILS"
        bounds = verdict.bounds_used
        suffix = "exhaustive" if verdict.exhaustive else "bounded"
        lines.append(f"{state}: {flag}  [bounds {bounds[0]},{bounds[1]}; {suffix}]")
        per_records = []
        for label, formula, sub in zip(labels, formulas, verdict.per_formula):
            mark = "holds" if sub.holds else "FAILS"
            lines.append(f"  {label}: {render(formula)} .. {mark}")
            if sub.counterexample is not None:
                lines.append(f"    counterexample: {format_trace(sub.counterexample)}")
            per_records.append(
                {
                    "label": label,
                    "formula": render(formula),
                    "holds": sub.holds,
                    "counterexample": (
                        None
                        if sub.counterexample is None
                        else format_trace(sub.counterexample)
                    ),
                }
            )
        records.append(
            {
                "record": "state",
                "state": state,
                "holds": verdict.holds,
                "max_prefix": bounds[0],
                "max_loop": bounds[1],
                "exhaustive": verdict.exhaustive,
                "counterexample": (
                    None
                    if verdict.counterexample is None
                    else format_trace(verdict.counterexample)
                ),
                "formulas": per_records,
            }
        )
    _emit(records, lines, args.format == "structured")
    return 0 if all_hold else 1


def _cmd_classify(args):
    ns = parse_norms(_read_file(args.norms))
    trace = _trace_argument(args, ns.propositions())
    verdict = classify_trace(ns, trace)
    lines = [f"status: {verdict.status}"]
    if verdict.violations:
        lines.append("violations:")
        for v in verdict.violations:
            if v.compensated:
                detail = f"compensated at position {v.compensation_position}"
            else:
                detail = "uncompensated"
            lines.append(f"  {v.norm_id} at position {v.position}: {detail}")
    else:
        lines.append("violations: none")
    lines.append("in force:")
    records = [
        {
            "record": "classification",
            "status": verdict.status,
            "positions": trace.num_positions,
        }
    ]
    for v in verdict.violations:
        records.append(
            {
                "record": "violation",
                "norm": v.norm_id,
                "position": v.position,
                "compensated": v.compensated,
                "compensation_position": v.compensation_position,
            }
        )
    for i, forces in enumerate(verdict.in_force):
        prohibitions = sorted(
            f.norm_id for f in forces if isinstance(f, ProhibitionInForce)
        )
        permissions = sorted(
            f.norm_id for f in forces if isinstance(f, PermissionInForce)
        )
        shown = [f"prohibition {n}" for n in prohibitions] + [
            f"permission {n}" for n in permissions
        ]
        lines.append(f"  position {i}: {', '.join(shown) if shown else 'nothing'}")
        records.append(
            {
                "record": "in_force",
                "position": i,
                "prohibitions": prohibitions,
                "permissions": permissions,
            }
        )
    _emit(records, lines, args.format == "structured")
    return 0 if verdict.status == COMPLIANT else 1


def _parse_override_file(text, count):
    overrides = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(">")]
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'WINNER > LOSER'")
        try:
            winner, loser = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: override indices must be integers") from None
        if not (1 <= winner <= count and 1 <= loser <= count):
            raise ValueError(f"line {lineno}: override index out of range 1..{count}")
        overrides.append((winner - 1, loser - 1))
    return overrides


def _cmd_rewrite(args):
    conditionals = []
    for raw in _read_file(args.conditionals).splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        conditionals.append(as_conditional(parse_formula(line)))
    overrides = _parse_override_file(_read_file(args.overrides), len(conditionals))
    rewritten = apply_overrides(conditionals, overrides)
    lines = [render(conditional_formula(c)) for c in rewritten]
    records = [
        {
            "record": "conditional",
            "index": i + 1,
            "antecedent": render(c.antecedent),
            "consequent": render(c.consequent),
            "formula": render(conditional_formula(c)),
        }
        for i, c in enumerate(rewritten)
    ]
    _emit(records, lines, args.format == "structured")
    return 0


def _cmd_equiv(args):
    f = parse_formula(args.f)
    g = parse_formula(args.g)
    result = brute_force_equiv(f, g, args.props, *args.bounds)
    record = {
        "record": "equiv",
        "f": render(f),
        "g": render(g),
        "equivalent": result.equivalent,
        "max_prefix": result.bounds[0],
        "max_loop": result.bounds[1],
    }
    if result.equivalent:
        lines = [
            f"equivalent: yes  [prefix <= {result.bounds[0]}, loop <= {result.bounds[1]}]"
        ]
        record["counterexample"] = None
    else:
        trace, (vf, vg) = result.counterexample
        lines = [
            "equivalent: no",
            f"counterexample: {format_trace(trace)}",
            f"values: f={'true' if vf else 'false'} g={'true' if vg else 'false'}",
        ]
        record["counterexample"] = format_trace(trace)
        record["values"] = [vf, vg]
    _emit([record], lines, args.format == "structured")
    return 0 if result.equivalent else 1


def _cmd_sat(args):
    f = parse_formula(args.f)
    witness = satisfiable_within(f, args.props, *args.bounds)
    record = {
        "record": "sat",
        "f": render(f),
        "satisfiable": witness is not None,
        "max_prefix": args.bounds[0],
        "max_loop": args.bounds[1],
        "witness": None if witness is None else format_trace(witness),
    }
    if witness is None:
        lines = [
            f"satisfiable: no  [prefix <= {args.bounds[0]}, loop <= {args.bounds[1]}]"
        ]
    else:
        lines = ["satisfiable: yes", f"witness: {format_trace(witness)}"]
    _emit([record], lines, args.format == "structured")
    return 0 if witness is not None else 1


def _cmd_table1(args):
    ns = parse_norms(_read_file(args.norms)) if args.norms else privacy_norms()
    report = table1_check(ns)
    width = max(len("minimal set"), *(len(r.label) for r in report.rows)) + 2
    status_width = max(len("expected"), *(len(r.expected) for r in report.rows)) + 2
    lines = [
        f"{'minimal set':<{width}}{'expected':<{status_width}}{'matched':>9}{'mismatched':>12}"
    ]
    records = []
    for row in report.rows:
        lines.append(
            f"{row.label:<{width}}{row.expected:<{status_width}}"
            f"{row.matched:>9}{row.mismatched:>12}"
        )
        records.append(
            {
                "record": "row",
                "pattern": row.label,
                "description": row.description,
                "expected": row.expected,
                "matched": row.matched,
                "mismatched": row.mismatched,
                "witness": None if row.witness is None else format_trace(row.witness),
                "witness_status": row.witness_status,
            }
        )
        if row.witness is not None:
            lines.append(
                f"  mismatch: {format_trace(row.witness)} classified {row.witness_status}"
            )
    lines.append(
        f"cross-check disagreements: {report.crosscheck_disagreements} of "
        f"{report.universe_size}"
    )
    lines.append(f"result: {'PASS' if report.ok else 'FAIL'}")
    records.append(
        {
            "record": "summary",
            "universe": report.universe_size,
            "max_prefix": report.bounds[0],
            "max_loop": report.bounds[1],
            "crosscheck_disagreements": report.crosscheck_disagreements,
            "ok": report.ok,
        }
    )
    _emit(records, lines, args.format == "structured")
    return 0 if report.ok else 1


def _cmd_demo_paradox(args):
    ns = privacy_norms()
    ts = privacy_ts()
    report = paradox_report(ns, ts, PRIVACY_RUN)
    lines = ["formulas:"]
    for norm, formula in zip(ns.norms, report.formulas):
        lines.append(f"  {norm.id}: {render(formula)}")
    b = report.bounds_used
    lines.append("")
    lines.append(f"formula check over the system (bounds {b[0]},{b[1]}):")
    for state in ts.states:
        verdict = report.model[state]
        lines.append(f"  {state}: {'holds' if verdict.holds else 'FAILS'}")
    lines.append(
        "  => "
        + (
            "satisfied at every state"
            if report.ltl_holds
            else "not satisfied at every state"
        )
    )
    prefix_ids, loop_ids = PRIVACY_RUN
    run_text = " ".join(prefix_ids) + " (" + " ".join(loop_ids) + ")*"
    lines.append("")
    lines.append(f"deontic classification of the run {run_text}:")
    lines.append(f"  status: {report.compliance.status}")
    if report.compliance.violations:
        lines.append("  violations:")
        for v in report.compliance.violations:
            detail = (
                f"compensated at position {v.compensation_position}"
                if v.compensated
                else "uncompensated"
            )
            lines.append(f"    {v.norm_id} at position {v.position}: {detail}")
    lines.append("")
    lines.append(f"DISCREPANCY: {'yes' if report.discrepancy else 'no'}")
    records = [
        {
            "record": "formulas",
            "formulas": [
                {"label": n.id, "formula": render(f)}
                for n, f in zip(ns.norms, report.formulas)
            ],
        },
        {
            "record": "model",
            "holds_everywhere": report.ltl_holds,
            "states": {s: report.model[s].holds for s in ts.states},
            "max_prefix": b[0],
            "max_loop": b[1],
        },
        {
            "record": "classification",
            "status": report.compliance.status,
            "violations": [
                {
                    "norm": v.norm_id,
                    "position": v.position,
                    "compensated": v.compensated,
                    "compensation_position": v.compensation_position,
                }
                for v in report.compliance.violations
            ],
        },
        {"record": "paradox", "discrepancy": report.discrepancy},
    ]
    _emit(records, lines, args.format == "structured")
    return 1 if report.discrepancy else 0


def run(argv=None) -> int:
    """Parse arguments and dispatch; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return args.func(args)
    except EmptyEnumeration as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
