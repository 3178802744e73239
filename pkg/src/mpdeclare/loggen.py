"""Seeded synthetic event logs and benchmark models.

Randomness comes from numpy's PCG64 bit generator. Trace ``k`` of a log is
drawn from its own stream seeded with ``SeedSequence([seed, k])``, so any
trace can be regenerated on its own and generation order does not matter.
Events are drawn independently (no process model drives them).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import accumulate
from typing import IO, Iterator, Sequence
from xml.sax.saxutils import quoteattr

import numpy as np

from .eventlog import (
    ACTIVITY_KEY,
    TIMESTAMP_KEY,
    Event,
    EventLog,
    Timestamp,
    Trace,
    format_iso_ms,
)
from .model import Constraint, Model, Template

HOUR = 3_600_000
RNG_ALGORITHM = "numpy PCG64, SeedSequence([seed, trace_ordinal])"
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    kind: str = "integer"  # integer | real | boolean | text | timestamp
    low: float = 0
    high: float = 100  # inclusive for integer/timestamp
    choices: tuple = ()
    write_probability: float = 1.0
    scope: str = "event"  # event | case

    def draw(self, rng: np.random.Generator, n: int) -> list:
        if self.kind == "integer":
            return rng.integers(int(self.low), int(self.high) + 1, n).tolist()
        if self.kind == "timestamp":
            return [Timestamp(v) for v in rng.integers(int(self.low), int(self.high) + 1, n).tolist()]
        if self.kind == "real":
            return rng.uniform(self.low, self.high, n).tolist()
        if self.kind == "boolean":
            return (rng.random(n) < 0.5).tolist()
        if self.kind == "text":
            choices = self.choices or ("x", "y", "z")
            return [choices[i] for i in rng.integers(0, len(choices), n).tolist()]
        raise ValueError(f"unknown attribute kind {self.kind!r}")


@dataclass(frozen=True)
class GenSpec:
    traces: int
    events_per_trace: int
    alphabet: tuple = ("a", "b", "c", "d")
    attribute_specs: tuple = ()
    inter_event_gap: tuple = (1, HOUR)  # inclusive ms range
    seed: int = 0
    min_events_per_trace: int | None = None  # set for variable-length traces
    start_ms: int = 1_600_000_000_000
    name: str = ""

    def validate(self) -> None:
        if self.traces < 0 or self.events_per_trace < 0:
            raise ValueError("trace and event counts must be non-negative")
        if self.events_per_trace > 0 and not self.alphabet:
            raise ValueError("alphabet must be non-empty when events are requested")
        lo, hi = self.inter_event_gap
        if not 0 <= lo <= hi:
            raise ValueError(f"bad inter-event gap range {self.inter_event_gap}")
        if self.min_events_per_trace is not None and not 0 <= self.min_events_per_trace <= self.events_per_trace:
            raise ValueError("min_events_per_trace must lie in [0, events_per_trace]")
        for a in self.attribute_specs:
            if a.scope not in ("event", "case"):
                raise ValueError(f"attribute {a.name}: unknown scope {a.scope!r}")


def trace_rng(seed: int, ordinal: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & _SEED_MASK, ordinal])))


def generate_trace(spec: GenSpec, ordinal: int) -> Trace:
    rng = trace_rng(spec.seed, ordinal)
    n = spec.events_per_trace
    if spec.min_events_per_trace is not None:
        n = int(rng.integers(spec.min_events_per_trace, spec.events_per_trace + 1))
    alphabet = spec.alphabet
    acts = [alphabet[k] for k in rng.integers(0, len(alphabet), n).tolist()] if n else []
    lo, hi = spec.inter_event_gap
    gaps = rng.integers(lo, hi + 1, n).tolist()
    if gaps:
        gaps[0] = 0
    times = list(accumulate(gaps, initial=spec.start_ms))[1:]

    case_attrs = {}
    per_event: list[dict] = [{} for _ in range(n)]
    for a in spec.attribute_specs:
        if a.scope == "case":
            case_attrs[a.name] = a.draw(rng, 1)[0]
            continue
        values = a.draw(rng, n)
        writes = (rng.random(n) < a.write_probability).tolist()
        for i in range(n):
            if writes[i]:
                per_event[i][a.name] = values[i]
    events = tuple(Event(acts[i], times[i], per_event[i], i) for i in range(n))
    return Trace(f"case_{ordinal}", events, case_attrs)


def iter_traces(spec: GenSpec, start: int = 0, stop: int | None = None) -> Iterator[Trace]:
    spec.validate()
    stop = spec.traces if stop is None else min(stop, spec.traces)
    for k in range(start, stop):
        yield generate_trace(spec, k)


def generate(spec: GenSpec) -> EventLog:
    return EventLog(tuple(iter_traces(spec)), spec.name or f"synthetic-{spec.traces}x{spec.events_per_trace}-s{spec.seed}")


# -- XES output ---------------------------------------------------------------

def _xes_attr(key: str, value) -> str:
    k = quoteattr(key)
    if isinstance(value, bool):
        return f'<boolean key={k} value="{"true" if value else "false"}"/>'
    if isinstance(value, Timestamp):
        return f'<date key={k} value="{format_iso_ms(value)}"/>'
    if isinstance(value, int):
        return f'<int key={k} value="{value}"/>'
    if isinstance(value, float):
        return f'<float key={k} value="{value!r}"/>'
    return f"<string key={k} value={quoteattr(str(value))}/>"


def write_xes(log: EventLog, sink: IO[bytes]) -> None:
    sink.write(b'<?xml version="1.0" encoding="UTF-8"?>\n<log xes.version="1.0">\n')
    for t in log.traces:
        lines = ["<trace>", _xes_attr(ACTIVITY_KEY, t.case_id)]
        lines += [_xes_attr(k, v) for k, v in t.case_attributes.items()]
        for e in t.events:
            lines.append("<event>")
            lines.append(_xes_attr(ACTIVITY_KEY, e.activity))
            lines.append(_xes_attr(TIMESTAMP_KEY, Timestamp(e.timestamp)))
            lines += [_xes_attr(k, v) for k, v in e.attributes.items()]
            lines.append("</event>")
        lines.append("</trace>\n")
        sink.write("\n".join(lines).encode("utf-8"))
    sink.write(b"</log>\n")


# -- random inputs for cross-validation ---------------------------------------

TEST_ATTRIBUTE = AttributeSpec("x", "integer", 0, 100, write_probability=0.75)


def random_test_log(seed: int, traces: int = 20, max_events: int = 15, alphabet_size: int = 4,
                    max_gap: int = 2 * HOUR) -> EventLog:
    """Variable-length log with one integer attribute, gaps in [0, max_gap] (ties allowed)."""
    spec = GenSpec(
        traces=traces,
        events_per_trace=max_events,
        min_events_per_trace=0,
        alphabet=tuple("abcdefghijklmnopqrstuvwxyz"[:alphabet_size]),
        attribute_specs=(TEST_ATTRIBUTE,),
        inter_event_gap=(0, max_gap),
        seed=seed,
        name=f"random-{seed}",
    )
    return generate(spec)


def _random_comparison(rng: np.random.Generator, sides: str) -> str:
    ops = ("==", "!=", "<", "<=", ">", ">=")
    op = ops[rng.integers(len(ops))]
    if sides == "A" or rng.random() < 0.3:
        side = "A" if sides == "A" else ("A", "T")[rng.integers(2)]
        return f"{side}.x {op} {int(rng.integers(0, 101))}"
    return f"A.x {op} T.x"


def random_condition(rng: np.random.Generator, sides: str) -> str:
    """A random condition over attribute ``x``; ``sides`` is "A" or "AT"."""
    r = rng.random()
    if r < 0.3:
        return "-"
    if r < 0.65:
        return _random_comparison(rng, sides)
    if r < 0.8:
        return f"not {_random_comparison(rng, sides)}"
    joiner = (" and ", " or ")[rng.integers(2)]
    return f"({_random_comparison(rng, sides)}){joiner}{_random_comparison(rng, sides)}"


def random_time_window(rng: np.random.Generator) -> str:
    if rng.random() < 0.35:
        return "-"
    lower = int(rng.choice([0, 0, 10, 30, 60]))
    if rng.random() < 0.2:
        return f"{lower},*,m"
    upper = lower + int(rng.choice([1, 30, 60, 90, 120, 180, 240]))
    return f"{lower},{upper},m"


def random_constraint(rng: np.random.Generator, template: Template, alphabet: Sequence[str],
                      id: str = "c") -> Constraint:
    """Random constraint with disjoint activation and target sets."""
    perm = [alphabet[i] for i in rng.permutation(len(alphabet)).tolist()]
    k_first = 1 + int(rng.random() < 0.25)
    k_second = 1 + int(rng.random() < 0.25)
    first = perm[:k_first]
    second = perm[k_first:k_first + k_second]
    return Constraint.build(
        template, first, second,
        activation=random_condition(rng, "A"),
        correlation=random_condition(rng, "AT"),
        time=random_time_window(rng),
        id=id,
    )


# -- benchmark models ---------------------------------------------------------

BENCH_ATTRIBUTE = AttributeSpec("amount", "integer", 0, 10_000, write_probability=0.5)
BENCH_CASE_ATTRIBUTE = AttributeSpec("group", "text", choices=("g1", "g2", "g3"), scope="case")
BENCH_RESOURCE = AttributeSpec("org:resource", "text", choices=("r1", "r2", "r3", "r4"), write_probability=0.8)
BENCH_ALPHABET = tuple(f"act_{i:02d}" for i in range(20))


def bench_spec(traces: int, events: int, seed: int = 1) -> GenSpec:
    return GenSpec(
        traces=traces,
        events_per_trace=events,
        alphabet=BENCH_ALPHABET,
        attribute_specs=(BENCH_CASE_ATTRIBUTE, BENCH_ATTRIBUTE, BENCH_RESOURCE),
        inter_event_gap=(60_000, 6 * HOUR),
        seed=seed,
        name=f"bench-{traces}x{events}",
    )


def _bench_pairs(size: int, seed: int, alphabet: Sequence[str]):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, size, 0xBE])))
    templates = list(Template)
    for k in range(size):
        a, b = (alphabet[i] for i in rng.choice(len(alphabet), 2, replace=False).tolist())
        yield k, templates[k % len(templates)], a, b, rng


def control_flow_model(size: int, seed: int = 1, alphabet: Sequence[str] = BENCH_ALPHABET) -> Model:
    cs = [Constraint.build(t, a, b, id=str(k + 1)) for k, t, a, b, _ in _bench_pairs(size, seed, alphabet)]
    return Model(tuple(cs), f"control-flow-{size}")


def multi_perspective_model(size: int, seed: int = 1, alphabet: Sequence[str] = BENCH_ALPHABET) -> Model:
    cs = []
    for k, t, a, b, rng in _bench_pairs(size, seed, alphabet):
        threshold = int(rng.integers(1_000, 9_000))
        act = (f"A.amount >= {threshold}", f"A.amount < {threshold} or A.group == 'g1'")[k % 2]
        corr = ("A.org:resource != T.org:resource", "A.group == T.group and T.amount <= A.amount")[k % 2]
        hours = int(rng.integers(2, 48))
        cs.append(Constraint.build(t, a, b, act, corr, f"0,{hours},h", id=str(k + 1)))
    return Model(tuple(cs), f"multi-perspective-{size}")


MODEL_FAMILIES = {"cf": control_flow_model, "mp": multi_perspective_model}
