"""Independent reference semantics for tests.

Evaluates formulas on lasso traces by direct recursion over the textbook
clauses. Quantifiers over future positions search the window up to one
position before prefix + 2*loop; since every subformula's truth is periodic
with the loop period beyond the prefix, that window contains a witness (or
a refutation for universal quantifiers) whenever one exists. No labeling
tables, no backward passes, so it shares nothing with the production
evaluator beyond the syntax tree.
"""

from normcheck.formula import (
    And,
    Atom,
    Comp,
    FalseBool,
    Finally,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    TrueBool,
    Until,
    WeakUntil,
)


def naive_eval(f, trace, i=0):
    p = len(trace.prefix)
    k = len(trace.loop)
    i = trace.distinguished(i)
    horizon = p + 2 * k  # exclusive search bound

    if isinstance(f, Atom):
        return f.name in trace.valuation(i)
    if isinstance(f, TrueBool):
        return True
    if isinstance(f, FalseBool):
        return False
    if isinstance(f, Not):
        return not naive_eval(f.operand, trace, i)
    if isinstance(f, And):
        return naive_eval(f.left, trace, i) and naive_eval(f.right, trace, i)
    if isinstance(f, Or):
        return naive_eval(f.left, trace, i) or naive_eval(f.right, trace, i)
    if isinstance(f, Implies):
        return (not naive_eval(f.left, trace, i)) or naive_eval(f.right, trace, i)
    if isinstance(f, Next):
        return naive_eval(f.operand, trace, i + 1)
    if isinstance(f, Until):
        for m in range(i, horizon):
            if naive_eval(f.right, trace, m) and all(
                naive_eval(f.left, trace, j) for j in range(i, m)
            ):
                return True
        return False
    if isinstance(f, Finally):
        return any(naive_eval(f.operand, trace, m) for m in range(i, horizon))
    if isinstance(f, Globally):
        return all(naive_eval(f.operand, trace, m) for m in range(i, horizon))
    if isinstance(f, WeakUntil):
        return naive_eval(Until(f.left, f.right), trace, i) or naive_eval(
            Globally(f.left), trace, i
        )
    if isinstance(f, Comp):
        if all(naive_eval(f.left, trace, m) for m in range(i, horizon)):
            return True
        for j in range(i, horizon):
            if not naive_eval(f.left, trace, j):
                if any(naive_eval(f.right, trace, m) for m in range(j, horizon)):
                    return True
        return False
    raise TypeError(f"not a formula: {f!r}")
