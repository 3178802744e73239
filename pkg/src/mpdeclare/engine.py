"""Conformance checking of MP-Declare constraints.

Every template is a set of five procedures (opening, fulfillment, violation,
activation, closing) driven by one generic per-trace loop. Only the response,
alternate response and chain response procedures are written out; precedence
templates reuse them over the reversed trace, responded existence combines a
forward and a backward pass, and negative templates swap the outcome of their
positive counterpart.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from .conditions import TRUE, compile_condition, verify_time
from .eventlog import EventLog, Trace, payloads
from .model import Constraint, Model, Template


@dataclass(frozen=True)
class CheckResult:
    case_id: str
    constraint_id: str
    fulfillments: frozenset = frozenset()
    violations: frozenset = frozenset()

    @property
    def activations(self) -> frozenset:
        return self.fulfillments | self.violations


def invert_negative(result: CheckResult) -> CheckResult:
    return CheckResult(result.case_id, result.constraint_id, result.violations, result.fulfillments)


# -- per-run state and context ------------------------------------------------

class ProcedureState:
    __slots__ = ("pending", "possible_targets", "fulfillments", "violations")

    def __init__(self):
        self.pending: list[int] = []
        self.possible_targets: list[int] | None = None
        self.fulfillments: set[int] = set()
        self.violations: set[int] = set()


class TraceContext:
    """Precomputed view of one trace for one constraint.

    ``is_activation[i]`` already includes the activation condition evaluated
    on the payload of event ``i``. ``matches(act, tgt)`` applies the
    correlation and time conditions; with ``backward`` set the time pair is
    oriented as (target, activation).
    """

    __slots__ = ("is_activation", "is_target", "timestamps", "payloads", "correlate",
                 "window", "backward", "evaluations")

    def __init__(self, is_activation, is_target, timestamps, payloads, correlate, window, backward=False):
        self.is_activation = is_activation
        self.is_target = is_target
        self.timestamps = timestamps
        self.payloads = payloads
        self.correlate = correlate
        self.window = window
        self.backward = backward
        self.evaluations = 0

    def reversed(self) -> "TraceContext":
        return TraceContext(self.is_activation, self.is_target, self.timestamps, self.payloads,
                            self.correlate, self.window, not self.backward)

    def matches(self, act: int, tgt: int) -> bool:
        self.evaluations += 1
        ts = self.timestamps
        if self.backward:
            ok = verify_time(self.window, ts[tgt], ts[act])
        else:
            ok = verify_time(self.window, ts[act], ts[tgt])
        if not ok:
            return False
        if self.correlate is None:
            return True
        return self.correlate(self.payloads[act], self.payloads[tgt])


# -- procedure sets -----------------------------------------------------------

class Procedures:
    """No-op procedure set; subclasses override what their template needs."""

    def opening(self, ctx: TraceContext, st: ProcedureState) -> None:
        pass

    def fulfillment(self, ctx: TraceContext, st: ProcedureState, e: int) -> None:
        pass

    def violation(self, ctx: TraceContext, st: ProcedureState, e: int) -> None:
        pass

    def activation(self, ctx: TraceContext, st: ProcedureState, e: int) -> None:
        pass

    def closing(self, ctx: TraceContext, st: ProcedureState) -> None:
        pass


class ResponseProcedures(Procedures):
    def activation(self, ctx, st, e):
        if ctx.is_activation[e]:
            st.pending.append(e)

    def fulfillment(self, ctx, st, e):
        if ctx.is_target[e] and st.pending:
            still = []
            for act in st.pending:
                if ctx.matches(act, e):
                    st.fulfillments.add(act)
                else:
                    still.append(act)
            st.pending = still

    # violations are only identified when closing

    def closing(self, ctx, st):
        st.violations.update(st.pending)
        st.pending = []


class AlternateResponseProcedures(Procedures):
    def opening(self, ctx, st):
        st.possible_targets = []

    def fulfillment(self, ctx, st, e):
        if ctx.is_activation[e] and st.possible_targets and len(st.pending) == 1:
            act = st.pending[0]
            for p in st.possible_targets:
                if ctx.matches(act, p):
                    st.fulfillments.add(act)
                    st.pending = []
                    break
        if ctx.is_target[e]:
            st.possible_targets.append(e)

    def violation(self, ctx, st, e):
        if ctx.is_activation[e] and len(st.pending) == 1:
            st.violations.add(st.pending[0])
            st.pending = []

    def activation(self, ctx, st, e):
        if ctx.is_activation[e]:
            st.possible_targets = []
            st.pending.append(e)

    def closing(self, ctx, st):
        if len(st.pending) == 1:
            act = st.pending[0]
            if any(ctx.matches(act, p) for p in st.possible_targets):
                st.fulfillments.add(act)
            else:
                st.violations.add(act)
            st.pending = []


class ChainResponseProcedures(Procedures):
    def fulfillment(self, ctx, st, e):
        if len(st.pending) == 1:
            act = st.pending[0]
            if ctx.is_target[e] and ctx.matches(act, e):
                st.fulfillments.add(act)
                st.pending = []

    def violation(self, ctx, st, e):
        # the fulfillment call already removed a matching activation, so any
        # activation still pending here failed the target or condition checks
        if len(st.pending) == 1:
            st.violations.add(st.pending[0])
            st.pending = []

    def activation(self, ctx, st, e):
        if ctx.is_activation[e]:
            st.pending.append(e)

    def closing(self, ctx, st):
        st.violations.update(st.pending)
        st.pending = []


RESPONSE = ResponseProcedures()
ALTERNATE_RESPONSE = AlternateResponseProcedures()
CHAIN_RESPONSE = ChainResponseProcedures()


@dataclass(frozen=True)
class Directed:
    """A procedure set together with the direction it walks the trace."""

    procedures: Procedures
    backward: bool = False

    def run(self, ctx: TraceContext, n: int) -> ProcedureState:
        if self.backward != ctx.backward:
            ctx = ctx.reversed()
        order = range(n - 1, -1, -1) if self.backward else range(n)
        procs = self.procedures
        st = ProcedureState()
        procs.opening(ctx, st)
        for e in order:
            procs.fulfillment(ctx, st, e)
            procs.violation(ctx, st, e)
            procs.activation(ctx, st, e)
        procs.closing(ctx, st)
        return st


def derive_backward(procedures: Procedures | Directed) -> Directed:
    if isinstance(procedures, Directed):
        procedures = procedures.procedures
    return Directed(procedures, backward=True)


_RUNNERS = {
    Template.RESPONSE: Directed(RESPONSE),
    Template.ALTERNATE_RESPONSE: Directed(ALTERNATE_RESPONSE),
    Template.CHAIN_RESPONSE: Directed(CHAIN_RESPONSE),
    Template.PRECEDENCE: derive_backward(RESPONSE),
    Template.ALTERNATE_PRECEDENCE: derive_backward(ALTERNATE_RESPONSE),
    Template.CHAIN_PRECEDENCE: derive_backward(CHAIN_RESPONSE),
}


def run_responded_existence(ctx: TraceContext, n: int) -> tuple[set, set]:
    fwd = _RUNNERS[Template.RESPONSE].run(ctx, n)
    bwd = _RUNNERS[Template.PRECEDENCE].run(ctx, n)
    fulfilled = fwd.fulfillments | bwd.fulfillments
    activations = fwd.fulfillments | fwd.violations
    return fulfilled, activations - fulfilled


# -- compiled constraints -----------------------------------------------------

@dataclass(frozen=True)
class CompiledConstraint:
    constraint: Constraint
    activation_pred: Callable | None
    correlation_pred: Callable | None
    needs_payloads: bool = field(default=False)
    runner: Directed | None = None  # None for responded existence
    negative: bool = False

    @classmethod
    def of(cls, c: Constraint) -> "CompiledConstraint":
        act = None if c.activation_condition == TRUE else compile_condition(c.activation_condition)
        corr = None if c.correlation_condition == TRUE else compile_condition(c.correlation_condition)
        positive = c.template.positive_counterpart or c.template
        return cls(c, act, corr, act is not None or corr is not None,
                   _RUNNERS.get(positive), c.template.is_negative)

    def context(self, activities: Sequence[str], timestamps: Sequence[int], snaps) -> TraceContext:
        c = self.constraint
        acts, tgts = c.activations, c.targets
        if self.activation_pred is None:
            is_act = [a in acts for a in activities]
        else:
            pred, empty = self.activation_pred, {}
            is_act = [a in acts and pred(snaps[i], empty) for i, a in enumerate(activities)]
        is_tgt = [a in tgts for a in activities]
        return TraceContext(is_act, is_tgt, timestamps, snaps, self.correlation_pred, c.time_condition)

    def check(self, case_id: str, activities, timestamps, snaps) -> CheckResult:
        ctx = self.context(activities, timestamps, snaps)
        if True not in ctx.is_activation:
            # no activations: every procedure set leaves both sets empty
            return CheckResult(case_id, self.constraint.id)
        n = len(activities)
        if self.runner is None:
            ful, vio = run_responded_existence(ctx, n)
        else:
            st = self.runner.run(ctx, n)
            ful, vio = st.fulfillments, st.violations
        result = CheckResult(case_id, self.constraint.id, frozenset(ful), frozenset(vio))
        return invert_negative(result) if self.negative else result


@lru_cache(maxsize=1024)
def compile_constraint(c: Constraint) -> CompiledConstraint:
    return CompiledConstraint.of(c)


def check_trace_conformance(trace: Trace, constraint: Constraint) -> CheckResult:
    cc = compile_constraint(constraint)
    activities = [e.activity for e in trace.events]
    timestamps = [e.timestamp for e in trace.events]
    snaps = payloads(trace) if cc.needs_payloads else None
    return cc.check(trace.case_id, activities, timestamps, snaps)


def _check_traces(traces: Sequence[Trace], compiled: Sequence[CompiledConstraint]) -> list[CheckResult]:
    needs_payloads = any(cc.needs_payloads for cc in compiled)
    out = []
    for trace in traces:
        events = trace.events
        activities = [e.activity for e in events]
        timestamps = [e.timestamp for e in events]
        snaps = payloads(trace) if needs_payloads else None
        for cc in compiled:
            out.append(cc.check(trace.case_id, activities, timestamps, snaps))
    return out


def _check_chunk(args):
    traces, constraints = args
    return _check_traces(traces, [compile_constraint(c) for c in constraints])


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("MPDC_WORKERS", "1")))
    except ValueError:
        return 1


def check_log_conformance(log: EventLog, model: Model, workers: int | None = None) -> list[CheckResult]:
    """Check every trace against every constraint.

    Results come back in (trace, constraint) order regardless of ``workers``.
    """
    workers = default_workers() if workers is None else max(1, workers)
    traces = log.traces
    constraints = tuple(model.constraints)
    if workers == 1 or len(traces) < 2:
        return _check_traces(traces, [compile_constraint(c) for c in constraints])

    size = -(-len(traces) // (workers * 4))
    chunks = [(traces[i:i + size], constraints) for i in range(0, len(traces), size)]
    out: list[CheckResult] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_check_chunk, chunks):
            out.extend(part)
    return out
