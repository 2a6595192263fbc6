"""Transition systems and lasso traces.

A lasso trace is a finite prefix of valuations followed by a nonempty loop
of valuations repeated forever; it is the finite representation of an
ultimately periodic infinite run. A valuation stores the propositions that
are true at a position; anything absent is false.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product

__all__ = [
    "TransitionSystem",
    "LassoTrace",
    "TraceFormatError",
    "SerialityViolation",
    "UndeclaredState",
    "UndeclaredProposition",
    "BrokenPath",
    "make_props",
    "parse_ts",
    "parse_trace",
    "format_trace",
    "trace_from_path",
    "enumerate_lassos",
    "enumerate_valuation_traces",
]

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


class TraceFormatError(ValueError):
    """Malformed transition-system or trace text."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{line}:{column or 1}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class SerialityViolation(ValueError):
    """A state with no outgoing transition."""

    def __init__(self, state):
        super().__init__(f"state {state!r} has no outgoing transition")
        self.state = state


class UndeclaredState(ValueError):
    def __init__(self, state):
        super().__init__(f"undeclared state {state!r}")
        self.state = state


class UndeclaredProposition(ValueError):
    def __init__(self, name):
        super().__init__(f"undeclared proposition {name!r}")
        self.name = name


class BrokenPath(ValueError):
    """A path step with no matching transition."""

    def __init__(self, source, target):
        super().__init__(f"no transition {source!r} -> {target!r}")
        self.source = source
        self.target = target


def make_props(names) -> tuple[str, ...]:
    """Validate proposition names and return them sorted, without duplicates."""
    out = []
    seen = set()
    for name in names:
        if not _IDENT.fullmatch(name):
            raise UndeclaredProposition(name)
        if name in seen:
            raise ValueError(f"duplicate proposition {name!r}")
        seen.add(name)
        out.append(name)
    return tuple(sorted(out))


class TransitionSystem:
    """Explicit states, a serial transition relation, per-state labels.

    Immutable after construction; all validation happens here. Every
    transition endpoint must be a declared state, every label must be a
    declared proposition, and every state needs at least one successor.
    """

    def __init__(self, props, states, transitions, labels):
        self.props = make_props(props)
        prop_set = set(self.props)
        state_list = []
        seen = set()
        for s in states:
            if not _IDENT.fullmatch(s):
                raise TraceFormatError(f"invalid state name {s!r}")
            if s in seen:
                raise ValueError(f"duplicate state {s!r}")
            seen.add(s)
            state_list.append(s)
        self.states = tuple(state_list)
        state_set = seen

        label_map = {}
        for s, names in labels.items():
            if s not in state_set:
                raise UndeclaredState(s)
            for name in names:
                if name not in prop_set:
                    raise UndeclaredProposition(name)
            label_map[s] = frozenset(names)
        self.labels = {s: label_map.get(s, frozenset()) for s in self.states}

        succ = {s: set() for s in self.states}
        pairs = set()
        for a, b in transitions:
            if a not in state_set:
                raise UndeclaredState(a)
            if b not in state_set:
                raise UndeclaredState(b)
            pairs.add((a, b))
            succ[a].add(b)
        self.transitions = frozenset(pairs)
        for s in self.states:
            if not succ[s]:
                raise SerialityViolation(s)
        self._successors = {s: tuple(sorted(succ[s])) for s in self.states}

    def successors(self, state) -> tuple[str, ...]:
        if state not in self._successors:
            raise UndeclaredState(state)
        return self._successors[state]

    def has_transition(self, source, target) -> bool:
        return (source, target) in self.transitions

    def __repr__(self):
        return (
            f"TransitionSystem(states={len(self.states)}, "
            f"transitions={len(self.transitions)}, props={self.props})"
        )


@dataclass(frozen=True)
class LassoTrace:
    """An ultimately periodic run: ``prefix`` then ``loop`` forever.

    Distinguished positions are 0 .. len(prefix)+len(loop)-1; any position
    beyond them maps back into the loop.
    """

    props: tuple[str, ...]
    prefix: tuple[frozenset[str], ...]
    loop: tuple[frozenset[str], ...]
    path: tuple[tuple[str, ...], tuple[str, ...]] | None = field(
        default=None, compare=False, repr=False
    )

    def __post_init__(self):
        object.__setattr__(self, "props", tuple(self.props))
        object.__setattr__(self, "prefix", tuple(frozenset(v) for v in self.prefix))
        object.__setattr__(self, "loop", tuple(frozenset(v) for v in self.loop))
        if not self.loop:
            raise ValueError("loop must be nonempty")
        prop_set = set(self.props)
        for val in self.prefix + self.loop:
            for name in val:
                if name not in prop_set:
                    raise UndeclaredProposition(name)

    @property
    def num_positions(self) -> int:
        return len(self.prefix) + len(self.loop)

    def distinguished(self, i: int) -> int:
        """The distinguished position that position i denotes."""
        p = len(self.prefix)
        if i < p:
            return i
        return p + (i - p) % len(self.loop)

    def valuation(self, i: int) -> frozenset[str]:
        p = len(self.prefix)
        if i < p:
            return self.prefix[i]
        return self.loop[(i - p) % len(self.loop)]

    def with_props(self, extra) -> "LassoTrace":
        """The same trace over a proposition set widened by ``extra``."""
        merged = make_props(set(self.props) | set(extra))
        if merged == self.props:
            return self
        return LassoTrace(merged, self.prefix, self.loop, self.path)

    def unroll_once(self) -> "LassoTrace":
        """An equivalent trace with one loop copy moved into the prefix."""
        return LassoTrace(self.props, self.prefix + self.loop, self.loop)


# --- transition-system file format ------------------------------------------


def parse_ts(text: str) -> TransitionSystem:
    """Parse the line-oriented transition-system format.

    Directives: ``props A B``, ``state name: A B``, ``trans a -> b``.
    ``#`` starts a comment. Validation errors carry the failing element.
    """
    props = []
    states = []
    labels = {}
    transitions = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        col = len(raw) - len(raw.lstrip()) + 1
        words = line.split()
        directive = words[0]
        if directive == "props":
            props.extend(words[1:])
        elif directive == "state":
            rest = line[len("state") :].strip()
            if ":" not in rest:
                raise TraceFormatError("expected 'state NAME: [props]'", lineno, col)
            name, _, label_part = rest.partition(":")
            name = name.strip()
            if not name:
                raise TraceFormatError("missing state name", lineno, col)
            if name in labels:
                raise TraceFormatError(f"duplicate state {name!r}", lineno, col)
            states.append(name)
            labels[name] = label_part.split()
        elif directive == "trans":
            if len(words) != 4 or words[2] != "->":
                raise TraceFormatError("expected 'trans FROM -> TO'", lineno, col)
            transitions.append((words[1], words[3]))
        else:
            raise TraceFormatError(f"unknown directive {directive!r}", lineno, col)
    try:
        return TransitionSystem(props, states, transitions, labels)
    except ValueError as exc:
        if isinstance(exc, (SerialityViolation, UndeclaredState, UndeclaredProposition)):
            raise
        raise TraceFormatError(str(exc)) from exc


# --- trace literals ----------------------------------------------------------


def parse_trace(text: str, *, ts: TransitionSystem | None = None, props=None) -> LassoTrace:
    """Parse a trace literal.

    Two forms exist. The valuation form lists the true propositions per
    position: ``prefix: {} {A,D} {B} ; loop: {}``. The state-id form names
    states of ``ts``: ``prefix: t0 t1 t2 ; loop: tl``. The prefix section
    may be omitted or empty. For the valuation form, the proposition set is
    ``props`` when given (undeclared names are rejected), otherwise the set
    of names mentioned.
    """
    sections = text.split(";")
    if len(sections) == 1:
        prefix_part, loop_part = None, sections[0]
    elif len(sections) == 2:
        prefix_part, loop_part = sections
    else:
        raise TraceFormatError("expected at most one ';' separating prefix and loop")

    def section_items(part, keyword):
        part = part.strip()
        if not part.startswith(keyword + ":"):
            raise TraceFormatError(f"expected {keyword + ':'!r} in trace literal")
        return part[len(keyword) + 1 :].split()

    prefix_items = section_items(prefix_part, "prefix") if prefix_part is not None else []
    loop_items = section_items(loop_part, "loop")
    if not loop_items:
        raise TraceFormatError("trace loop must list at least one position")

    braced = [item.startswith("{") for item in prefix_items + loop_items]
    if any(braced) and not all(braced):
        raise TraceFormatError("cannot mix state ids and valuations in one trace")

    if not any(braced):
        if ts is None:
            raise TraceFormatError("state-id trace literal requires a transition system")
        return trace_from_path(ts, prefix_items, loop_items)

    def parse_valuation(item):
        m = re.fullmatch(r"\{([^{}]*)\}", item)
        if not m:
            raise TraceFormatError(f"malformed valuation {item!r}")
        inner = m.group(1).strip()
        if not inner:
            return frozenset()
        names = [n.strip() for n in inner.split(",")]
        for n in names:
            if not _IDENT.fullmatch(n):
                raise TraceFormatError(f"invalid proposition {n!r} in {item!r}")
        return frozenset(names)

    prefix = tuple(parse_valuation(i) for i in prefix_items)
    loop = tuple(parse_valuation(i) for i in loop_items)
    mentioned = set().union(*prefix, *loop) if (prefix or loop) else set()
    if props is None:
        prop_tuple = make_props(mentioned)
    else:
        prop_tuple = make_props(props)
        for name in mentioned:
            if name not in prop_tuple:
                raise UndeclaredProposition(name)
    return LassoTrace(prop_tuple, prefix, loop)


def format_trace(trace: LassoTrace) -> str:
    """Render a trace as a valuation-form literal."""

    def fmt(val):
        return "{" + ",".join(sorted(val)) + "}"

    prefix = " ".join(fmt(v) for v in trace.prefix)
    loop = " ".join(fmt(v) for v in trace.loop)
    return f"prefix: {prefix}{' ' if prefix else ''}; loop: {loop}"


# --- paths and enumeration ----------------------------------------------------


def trace_from_path(ts: TransitionSystem, prefix_ids, loop_ids) -> LassoTrace:
    """The trace labelled along a lasso-shaped state path.

    Consecutive states, the junction from prefix into loop, and the loop
    wrap-around must all be transitions of ``ts``.
    """
    prefix_ids = tuple(prefix_ids)
    loop_ids = tuple(loop_ids)
    if not loop_ids:
        raise ValueError("loop must be nonempty")
    for s in prefix_ids + loop_ids:
        if s not in ts.labels:
            raise UndeclaredState(s)
    walk = prefix_ids + loop_ids
    for a, b in zip(walk, walk[1:]):
        if not ts.has_transition(a, b):
            raise BrokenPath(a, b)
    if not ts.has_transition(loop_ids[-1], loop_ids[0]):
        raise BrokenPath(loop_ids[-1], loop_ids[0])
    return LassoTrace(
        ts.props,
        tuple(ts.labels[s] for s in prefix_ids),
        tuple(ts.labels[s] for s in loop_ids),
        path=(prefix_ids, loop_ids),
    )


def _walks(ts, state, length):
    """All state sequences of exactly ``length`` states from ``state``,
    in lexicographic successor order."""
    if length == 1:
        yield (state,)
        return
    for nxt in ts.successors(state):
        for rest in _walks(ts, nxt, length - 1):
            yield (state,) + rest


def enumerate_lassos(ts: TransitionSystem, start, max_prefix: int, max_loop: int):
    """Every lasso path from ``start`` within the given bounds, exactly once.

    A lasso is identified by its state-id sequence together with the split
    point between prefix and loop. Order is deterministic: shorter total
    length first, then lexicographic by state ids, then increasing prefix
    length.
    """
    if start not in ts.labels:
        raise UndeclaredState(start)
    if max_loop < 1:
        raise ValueError("max_loop must be at least 1")
    if max_prefix < 0:
        raise ValueError("max_prefix must be nonnegative")
    for total in range(1, max_prefix + max_loop + 1):
        for walk in _walks(ts, start, total):
            low = max(0, total - max_loop)
            high = min(max_prefix, total - 1)
            for p in range(low, high + 1):
                if ts.has_transition(walk[-1], walk[p]):
                    yield trace_from_path(ts, walk[:p], walk[p:])


def enumerate_valuation_traces(props, max_prefix: int, max_loop: int):
    """Every lasso trace over ``props`` within the bounds.

    Yields (2^|props|)^(p+l) traces for each prefix length p <= max_prefix
    and loop length 1 <= l <= max_loop, in a fixed order: increasing prefix
    length, then loop length, then valuations in binary-counting order over
    the sorted proposition tuple.
    """
    if max_loop < 1:
        raise ValueError("max_loop must be at least 1")
    props = make_props(props)
    subsets = []
    for mask in range(1 << len(props)):
        subsets.append(frozenset(p for i, p in enumerate(props) if mask >> i & 1))
    for p in range(max_prefix + 1):
        for l in range(1, max_loop + 1):
            for vals in product(subsets, repeat=p + l):
                yield LassoTrace(props, vals[:p], vals[p:])
