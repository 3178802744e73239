"""Brute-force reference semantics for MP-Declare templates.

Each template is written as a formula of a small metric first-order temporal
fragment (next / previous, until / since, eventually / once, each with an
interval) and evaluated by exhaustive quantification over trace positions.
The universally quantified payload ``x`` is the payload of the activation
event; the existential ``y`` ranges over payloads of the candidate targets.

This module shares nothing with the procedure-based engine apart from the
condition evaluator and the data types, and it is deliberately slow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .conditions import TimeWindow, compile_condition
from .engine import CheckResult
from .eventlog import Trace, payload_at
from .model import Constraint, Template

ALWAYS = TimeWindow(0, math.inf)


class UnsupportedTemplate(ValueError):
    pass


class TimedStructureView:
    """Read-only positional view of a trace: activity, payload and time per position."""

    def __init__(self, trace: Trace):
        self.trace = trace
        self.n = len(trace.events)

    def activity(self, i: int) -> str:
        return self.trace.events[i].activity

    def time(self, i: int) -> int:
        return self.trace.events[i].timestamp

    def payload(self, i: int):
        return payload_at(self.trace, i)

    def in_interval(self, window: TimeWindow, earlier: int, later: int) -> bool:
        delta = self.time(later) - self.time(earlier)
        return window.lower <= delta < window.upper


# -- formulas -----------------------------------------------------------------
# A formula is evaluated at position ``i`` under valuation ``x`` (the position
# whose payload the universally quantified variable is bound to).

class Formula:
    def holds(self, s: TimedStructureView, i: int, x: int) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class Atom(Formula):
    test: Callable[[TimedStructureView, int, int], bool]

    def holds(self, s, i, x):
        return self.test(s, i, x)


@dataclass(frozen=True)
class Neg(Formula):
    f: Formula

    def holds(self, s, i, x):
        return not self.f.holds(s, i, x)


@dataclass(frozen=True)
class Disj(Formula):
    f: Formula
    g: Formula

    def holds(self, s, i, x):
        return self.f.holds(s, i, x) or self.g.holds(s, i, x)


@dataclass(frozen=True)
class Next(Formula):
    window: TimeWindow
    f: Formula

    def holds(self, s, i, x):
        return i + 1 < s.n and s.in_interval(self.window, i, i + 1) and self.f.holds(s, i + 1, x)


@dataclass(frozen=True)
class Prev(Formula):
    window: TimeWindow
    f: Formula

    def holds(self, s, i, x):
        return i > 0 and s.in_interval(self.window, i - 1, i) and self.f.holds(s, i - 1, x)


@dataclass(frozen=True)
class Until(Formula):
    window: TimeWindow
    f: Formula
    g: Formula

    def holds(self, s, i, x):
        for j in range(i, s.n):
            if (s.in_interval(self.window, i, j) and self.g.holds(s, j, x)
                    and all(self.f.holds(s, k, x) for k in range(i, j))):
                return True
        return False


@dataclass(frozen=True)
class Since(Formula):
    window: TimeWindow
    f: Formula
    g: Formula

    def holds(self, s, i, x):
        for j in range(i, -1, -1):
            if (s.in_interval(self.window, j, i) and self.g.holds(s, j, x)
                    and all(self.f.holds(s, k, x) for k in range(j + 1, i + 1))):
                return True
        return False


TOP = Atom(lambda s, i, x: True)


def eventually(window, f):
    return Until(window, TOP, f)


def once(window, f):
    return Since(window, TOP, f)


# -- template formulas --------------------------------------------------------

def _activation(c: Constraint) -> Formula:
    pred = compile_condition(c.activation_condition)
    acts = c.activations
    # evaluated on the payload of the position itself
    return Atom(lambda s, i, x: s.activity(i) in acts and pred(s.payload(i), {}))


def _target(c: Constraint, window: TimeWindow | None = None) -> Formula:
    """Target event whose payload y satisfies the correlation with x.

    With ``window`` the distance to the activation time is checked here
    (used under a non-metric next/previous operator).
    """
    pred = compile_condition(c.correlation_condition)
    tgts = c.targets

    def test(s, i, x):
        if s.activity(i) not in tgts or not pred(s.payload(x), s.payload(i)):
            return False
        if window is None:
            return True
        lo, hi = (x, i) if i >= x else (i, x)
        return s.in_interval(window, lo, hi)
    return Atom(test)


def obligation(c: Constraint) -> Formula:
    """Right-hand side of the template implication, to be evaluated at the activation."""
    t = c.template.positive_counterpart or c.template
    w = c.time_condition
    if t is Template.RESPONDED_EXISTENCE:
        body = Disj(once(w, _target(c)), eventually(w, _target(c)))
    elif t is Template.RESPONSE:
        body = eventually(w, _target(c))
    elif t is Template.PRECEDENCE:
        body = once(w, _target(c))
    elif t is Template.CHAIN_RESPONSE:
        body = Next(w, _target(c))
    elif t is Template.CHAIN_PRECEDENCE:
        body = Prev(w, _target(c))
    elif t is Template.ALTERNATE_RESPONSE:
        # interval measured from the activation, not from the next position
        body = Next(ALWAYS, Until(ALWAYS, Neg(_activation(c)), _target(c, w)))
    elif t is Template.ALTERNATE_PRECEDENCE:
        body = Prev(ALWAYS, Since(ALWAYS, Neg(_activation(c)), _target(c, w)))
    else:
        raise UnsupportedTemplate(f"no reference semantics for {c.template}")
    return Neg(body) if c.template.is_negative else body


def _check_supported(c: Constraint):
    if not isinstance(c.template, Template):
        raise UnsupportedTemplate(f"unsupported template {c.template!r}")


def oracle_satisfies(trace: Trace, constraint: Constraint) -> bool:
    """Evaluate G(forall x. (activation(x) -> obligation(x))) on the trace."""
    _check_supported(constraint)
    s = TimedStructureView(trace)
    act = _activation(constraint)
    body = obligation(constraint)
    return all(not act.holds(s, i, i) or body.holds(s, i, i) for i in range(s.n))


def oracle_classify(trace: Trace, constraint: Constraint) -> CheckResult:
    """Classify each activation independently: fulfilled iff its obligation holds."""
    _check_supported(constraint)
    s = TimedStructureView(trace)
    act = _activation(constraint)
    body = obligation(constraint)
    fulfilled, violated = set(), set()
    for i in range(s.n):
        if act.holds(s, i, i):
            (fulfilled if body.holds(s, i, i) else violated).add(i)
    return CheckResult(trace.case_id, constraint.id, frozenset(fulfilled), frozenset(violated))
