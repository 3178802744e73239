"""Engine-versus-oracle comparison on given or randomly generated inputs."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .engine import CheckResult, check_trace_conformance
from .eventlog import EventLog, Trace, log_to_json
from .loggen import random_constraint, random_test_log
from .model import Constraint, Model, Template, render_constraint
from .oracle import oracle_classify


@dataclass(frozen=True)
class Disagreement:
    trace: Trace
    constraint: Constraint
    engine: CheckResult
    oracle: CheckResult

    @property
    def events(self) -> list[int]:
        """Event indices classified differently (or only by one side)."""
        diff = (self.engine.fulfillments ^ self.oracle.fulfillments) | (self.engine.violations ^ self.oracle.violations)
        return sorted(diff)

    def dump(self) -> str:
        log = EventLog((self.trace,), "reproduction")
        return json.dumps({
            "constraint": render_constraint(self.constraint),
            "events": self.events,
            "engine": {"fulfillments": sorted(self.engine.fulfillments), "violations": sorted(self.engine.violations)},
            "oracle": {"fulfillments": sorted(self.oracle.fulfillments), "violations": sorted(self.oracle.violations)},
            "log": log_to_json(log),
        }, indent=2)


def compare(log: EventLog, model: Model,
            engine_check: Callable[[Trace, Constraint], CheckResult] = check_trace_conformance,
            ) -> Iterator[Disagreement]:
    for trace in log.traces:
        for c in model.constraints:
            got = engine_check(trace, c)
            want = oracle_classify(trace, c)
            if got.fulfillments != want.fulfillments or got.violations != want.violations:
                yield Disagreement(trace, c, got, want)


def random_model(seed: int, alphabet=("a", "b", "c", "d")) -> Model:
    """One random constraint per template."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0xC0])))
    cs = tuple(random_constraint(rng, t, alphabet, id=t.value) for t in Template)
    return Model(cs, f"random-{seed}")


def random_cases(cases: int, seed: int = 0) -> Iterator[tuple[EventLog, Model]]:
    for k in range(cases):
        case_seed = seed * 1_000_003 + k
        yield random_test_log(case_seed), random_model(case_seed)
