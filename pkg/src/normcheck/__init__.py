"""Compliance checking of transition systems and lasso traces against
temporal-logic norm sets with compensable prohibitions."""

from .formula import (
    And,
    Atom,
    Comp,
    FalseBool,
    Finally,
    Formula,
    FormulaSyntaxError,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    TrueBool,
    Until,
    WeakUntil,
    atoms,
    expand_derived,
    parse_formula,
    render,
    subformulas,
)
from .traces import (
    BrokenPath,
    LassoTrace,
    SerialityViolation,
    TraceFormatError,
    TransitionSystem,
    UndeclaredProposition,
    UndeclaredState,
    enumerate_lassos,
    enumerate_valuation_traces,
    format_trace,
    parse_trace,
    parse_ts,
    trace_from_path,
)
from .evaluate import (
    EmptyEnumeration,
    Labeling,
    ModelVerdict,
    UnknownAtom,
    check_model,
    check_state,
    eval_at,
    eval_comp_direct,
    eval_on_trace,
    label_trace,
)
from .norms import (
    COMPLIANT,
    NON_COMPLIANT,
    WEAKLY_COMPLIANT,
    ComplianceVerdict,
    Conditional,
    NonStratified,
    NormSet,
    NormSyntaxError,
    ParadoxReport,
    Permission,
    PermissionInForce,
    Prohibition,
    ProhibitionInForce,
    UnsupportedConditionShape,
    Violation,
    apply_overrides,
    as_conditional,
    classify_trace,
    compile_norms,
    conditional_formula,
    deontic_in_force,
    paradox_report,
    parse_norms,
)
from .oracle import (
    EquivResult,
    PatternMismatch,
    Table1Report,
    brute_force_equiv,
    satisfiable_within,
    table1_check,
)

__version__ = "0.1.0"
