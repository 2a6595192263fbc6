"""Formula language: syntax tree, parser, printer, core-form expansion.

The language has boolean connectives (``!``, ``&``, ``|``, ``->``), the
unary temporal operators ``X`` (next), ``F`` (eventually), ``G`` (always),
the binary temporal operators ``U`` (until) and ``W`` (weak until), and a
binary compensation operator written ``(+)``: ``f (+) g`` holds when f is
maintained at every instant, or when every lapse of f is followed (possibly
at the same instant) by an occurrence of g.

Precedence, loosest to tightest: ``->`` (right associative), ``|``, ``&``,
the binary temporal operators (right associative, and distinct operators
may not be mixed in one chain without parentheses), the unary operators,
atoms and parenthesised formulas.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = [
    "Formula",
    "Atom",
    "TrueBool",
    "FalseBool",
    "Not",
    "And",
    "Or",
    "Implies",
    "Next",
    "Finally",
    "Globally",
    "Until",
    "WeakUntil",
    "Comp",
    "FormulaSyntaxError",
    "RESERVED_WORDS",
    "parse_formula",
    "render",
    "expand_derived",
    "subformulas",
    "children",
    "atoms",
    "conjoin",
]

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")

# Words the grammar claims for itself; they can never name a proposition.
RESERVED_WORDS = frozenset({"true", "false", "X", "F", "G", "U", "W"})


class FormulaSyntaxError(ValueError):
    """Malformed formula text. Carries a 1-based line and column."""

    def __init__(self, message, line, column):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not _IDENT.fullmatch(self.name):
            raise ValueError(f"invalid proposition name: {self.name!r}")
        if self.name in RESERVED_WORDS:
            raise ValueError(f"proposition name {self.name!r} is a reserved word")


@dataclass(frozen=True)
class TrueBool(Formula):
    pass


@dataclass(frozen=True)
class FalseBool(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Finally(Formula):
    operand: Formula


@dataclass(frozen=True)
class Globally(Formula):
    operand: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class WeakUntil(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Comp(Formula):
    """Compensation operator, written ``(+)`` in concrete syntax."""

    left: Formula
    right: Formula


_UNARY = (Not, Next, Finally, Globally)
_BINARY = (And, Or, Implies, Until, WeakUntil, Comp)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, _UNARY):
        return (f.operand,)
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    return ()


def atoms(f: Formula) -> frozenset[str]:
    """Names of all propositions occurring in f."""
    out = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            out.add(node.name)
        else:
            stack.extend(children(node))
    return frozenset(out)


def subformulas(f: Formula) -> list[Formula]:
    """All subformulas of f in post order (children first, f last).

    Structurally equal subformulas appear once.
    """
    seen = set()
    out = []

    def walk(node):
        if node in seen:
            return
        for child in children(node):
            walk(child)
        seen.add(node)
        out.append(node)

    walk(f)
    return out


def conjoin(fs) -> Formula:
    """Left-folded conjunction of a nonempty sequence of formulas."""
    fs = list(fs)
    if not fs:
        raise ValueError("cannot conjoin an empty sequence")
    result = fs[0]
    for f in fs[1:]:
        result = And(result, f)
    return result


# --- parsing ---------------------------------------------------------------

_KEYWORD_TOKENS = {
    "true": "TRUE",
    "false": "FALSE",
    "X": "NEXT",
    "F": "FINALLY",
    "G": "GLOBALLY",
    "U": "UNTIL",
    "W": "WEAKUNTIL",
}

_TEMPORAL_BINARY = {
    "UNTIL": Until,
    "WEAKUNTIL": WeakUntil,
    "COMP": Comp,
}

_TOKEN_NAMES = {
    "UNTIL": "U",
    "WEAKUNTIL": "W",
    "COMP": "(+)",
}


class _Token:
    __slots__ = ("kind", "text", "line", "column")

    def __init__(self, kind, text, line, column):
        self.kind = kind
        self.text = text
        self.line = line
        self.column = column


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch.isalpha():
            m = _IDENT.match(text, i)
            word = m.group(0)
            kind = _KEYWORD_TOKENS.get(word, "IDENT")
            tokens.append(_Token(kind, word, line, col))
            col += len(word)
            i = m.end()
            continue
        if ch == "(":
            if text.startswith("(+)", i):
                tokens.append(_Token("COMP", "(+)", line, col))
                i += 3
                col += 3
            else:
                tokens.append(_Token("LPAREN", "(", line, col))
                i += 1
                col += 1
            continue
        if ch == ")":
            tokens.append(_Token("RPAREN", ")", line, col))
            i += 1
            col += 1
            continue
        if ch == "!":
            tokens.append(_Token("NOT", "!", line, col))
            i += 1
            col += 1
            continue
        if ch == "&":
            tokens.append(_Token("AND", "&", line, col))
            i += 1
            col += 1
            continue
        if ch == "|":
            tokens.append(_Token("OR", "|", line, col))
            i += 1
            col += 1
            continue
        if ch == "-":
            if text.startswith("->", i):
                tokens.append(_Token("IMPLIES", "->", line, col))
                i += 2
                col += 2
                continue
            raise FormulaSyntaxError("unknown operator token '-'", line, col)
        raise FormulaSyntaxError(f"unknown operator token {ch!r}", line, col)
    tokens.append(_Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        shown = tok.text if tok.kind != "EOF" else "end of input"
        raise FormulaSyntaxError(f"{message} (at {shown!r})", tok.line, tok.column)

    def parse(self):
        f = self.implies()
        if self.peek().kind != "EOF":
            self.fail("unexpected trailing input")
        return f

    def implies(self):
        left = self.disjunction()
        if self.peek().kind == "IMPLIES":
            self.take()
            return Implies(left, self.implies())
        return left

    def disjunction(self):
        f = self.conjunction()
        while self.peek().kind == "OR":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.temporal()
        while self.peek().kind == "AND":
            self.take()
            f = And(f, self.temporal())
        return f

    def temporal(self):
        operands = [self.unary()]
        chain_kind = None
        while self.peek().kind in _TEMPORAL_BINARY:
            tok = self.take()
            if chain_kind is None:
                chain_kind = tok.kind
            elif tok.kind != chain_kind:
                self.fail(
                    f"cannot mix '{_TOKEN_NAMES[tok.kind]}' with "
                    f"'{_TOKEN_NAMES[chain_kind]}' without parentheses",
                    tok,
                )
            operands.append(self.unary())
        if chain_kind is None:
            return operands[0]
        cls = _TEMPORAL_BINARY[chain_kind]
        result = operands[-1]
        for operand in reversed(operands[:-1]):
            result = cls(operand, result)
        return result

    def unary(self):
        kind = self.peek().kind
        if kind == "NOT":
            self.take()
            return Not(self.unary())
        if kind == "NEXT":
            self.take()
            return Next(self.unary())
        if kind == "FINALLY":
            self.take()
            return Finally(self.unary())
        if kind == "GLOBALLY":
            self.take()
            return Globally(self.unary())
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok.kind == "TRUE":
            self.take()
            return TrueBool()
        if tok.kind == "FALSE":
            self.take()
            return FalseBool()
        if tok.kind == "IDENT":
            self.take()
            return Atom(tok.text)
        if tok.kind == "LPAREN":
            self.take()
            f = self.implies()
            if self.peek().kind != "RPAREN":
                self.fail("expected ')'")
            self.take()
            return f
        self.fail("expected a formula")


def parse_formula(text: str) -> Formula:
    """Parse concrete syntax into a syntax tree.

    Raises FormulaSyntaxError (with 1-based line/column) on bad input.
    """
    return _Parser(_tokenize(text)).parse()


# --- printing --------------------------------------------------------------

_PREC_IMPLIES = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_TEMPORAL = 4
_PREC_UNARY = 5
_PREC_ATOM = 6

_TEMPORAL_SYMBOL = {Until: "U", WeakUntil: "W", Comp: "(+)"}
_UNARY_SYMBOL = {Next: "X", Finally: "F", Globally: "G"}


def render(f: Formula) -> str:
    """Print f with minimal parentheses; reparses to a structurally equal tree."""
    return _render(f, 0)


def _render(f, min_prec):
    if isinstance(f, Atom):
        text, prec = f.name, _PREC_ATOM
    elif isinstance(f, TrueBool):
        text, prec = "true", _PREC_ATOM
    elif isinstance(f, FalseBool):
        text, prec = "false", _PREC_ATOM
    elif isinstance(f, Not):
        text, prec = "!" + _render(f.operand, _PREC_UNARY), _PREC_UNARY
    elif isinstance(f, (Next, Finally, Globally)):
        symbol = _UNARY_SYMBOL[type(f)]
        text, prec = symbol + " " + _render(f.operand, _PREC_UNARY), _PREC_UNARY
    elif isinstance(f, And):
        text = _render(f.left, _PREC_AND) + " & " + _render(f.right, _PREC_AND + 1)
        prec = _PREC_AND
    elif isinstance(f, Or):
        text = _render(f.left, _PREC_OR) + " | " + _render(f.right, _PREC_OR + 1)
        prec = _PREC_OR
    elif isinstance(f, Implies):
        text = _render(f.left, _PREC_IMPLIES + 1) + " -> " + _render(f.right, _PREC_IMPLIES)
        prec = _PREC_IMPLIES
    elif isinstance(f, (Until, WeakUntil, Comp)):
        symbol = _TEMPORAL_SYMBOL[type(f)]
        # A right operand of the same operator continues the chain; any other
        # binary temporal operator there must be parenthesised (mixing is a
        # parse error).
        right_prec = _PREC_TEMPORAL if type(f.right) is type(f) else _PREC_TEMPORAL + 1
        text = (
            _render(f.left, _PREC_TEMPORAL + 1)
            + f" {symbol} "
            + _render(f.right, right_prec)
        )
        prec = _PREC_TEMPORAL
    else:
        raise TypeError(f"not a formula: {f!r}")
    if prec < min_prec:
        return "(" + text + ")"
    return text


# --- expansion to the core fragment ----------------------------------------


def expand_derived(f: Formula) -> Formula:
    """Rewrite away F, G, W and the compensation operator.

    The result uses only atoms, constants, boolean connectives, X and U:

        F g       =>  true U g
        G g       =>  !(true U !g)
        g W h     =>  (g U h) | !(true U !g)
        g (+) h   =>  !(true U !g) | (true U (!g & (true U h)))
    """
    if isinstance(f, (Atom, TrueBool, FalseBool)):
        return f
    if isinstance(f, Not):
        return Not(expand_derived(f.operand))
    if isinstance(f, Next):
        return Next(expand_derived(f.operand))
    if isinstance(f, And):
        return And(expand_derived(f.left), expand_derived(f.right))
    if isinstance(f, Or):
        return Or(expand_derived(f.left), expand_derived(f.right))
    if isinstance(f, Implies):
        return Implies(expand_derived(f.left), expand_derived(f.right))
    if isinstance(f, Until):
        return Until(expand_derived(f.left), expand_derived(f.right))
    if isinstance(f, Finally):
        return Until(TrueBool(), expand_derived(f.operand))
    if isinstance(f, Globally):
        g = expand_derived(f.operand)
        return Not(Until(TrueBool(), Not(g)))
    if isinstance(f, WeakUntil):
        g = expand_derived(f.left)
        h = expand_derived(f.right)
        return Or(Until(g, h), Not(Until(TrueBool(), Not(g))))
    if isinstance(f, Comp):
        g = expand_derived(f.left)
        h = expand_derived(f.right)
        always_g = Not(Until(TrueBool(), Not(g)))
        lapse_then_h = Until(TrueBool(), And(Not(g), Until(TrueBool(), h)))
        return Or(always_g, lapse_then_h)
    raise TypeError(f"not a formula: {f!r}")
