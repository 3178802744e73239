"""Scaling benchmark: generated logs of increasing size against generated models."""
from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from .engine import check_log_conformance
from .eventlog import EventLog
from .loggen import MODEL_FAMILIES, bench_spec, generate
from .model import Model

GRIDS = {
    # traces, events per trace, model sizes
    "default": ((25_000, 50_000, 75_000, 100_000), (10, 20, 30, 40, 50), (10, 20, 30, 40, 50)),
    "small": ((2_500, 5_000), (10, 20), (10,)),
    "smoke": ((200,), (10,), (10,)),
}
CSV_HEADER = ("traces", "events_per_trace", "total_events", "family", "constraints", "reps", "mean_ms", "stdev_ms")


@dataclass(frozen=True)
class Timing:
    traces: int
    events_per_trace: int
    family: str
    constraints: int
    runs_ms: tuple

    @property
    def total_events(self) -> int:
        return self.traces * self.events_per_trace

    @property
    def mean_ms(self) -> float:
        return statistics.fmean(self.runs_ms)

    @property
    def stdev_ms(self) -> float:
        return statistics.stdev(self.runs_ms) if len(self.runs_ms) > 1 else 0.0


def time_check(log: EventLog, model: Model, reps: int = 5, workers: int = 1) -> tuple:
    """Wall-clock milliseconds of ``reps`` conformance checks; reporting is not timed."""
    runs = []
    for _ in range(reps):
        t0 = time.perf_counter()
        check_log_conformance(log, model, workers=workers)
        runs.append((time.perf_counter() - t0) * 1000.0)
    return tuple(runs)


def run_grid(traces: Sequence[int], events: Sequence[int], sizes: Sequence[int],
             families: Sequence[str] = ("cf", "mp"), reps: int = 5, seed: int = 1,
             workers: int = 1, progress=None) -> list[Timing]:
    out = []
    for n_traces in traces:
        for n_events in events:
            log = generate(bench_spec(n_traces, n_events, seed))
            for family in families:
                for size in sizes:
                    model = MODEL_FAMILIES[family](size, seed)
                    timing = Timing(n_traces, n_events, family, size, time_check(log, model, reps, workers))
                    if progress is not None:
                        progress(timing)
                    out.append(timing)
            del log
    return out


def timing_row(t: Timing) -> list[str]:
    return [str(t.traces), str(t.events_per_trace), str(t.total_events), t.family, str(t.constraints),
            str(len(t.runs_ms)), f"{t.mean_ms:.1f}", f"{t.stdev_ms:.1f}"]


def render_timings_csv(timings: Iterable[Timing]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_HEADER)
    for t in timings:
        w.writerow(timing_row(t))
    return buf.getvalue().encode("utf-8")
