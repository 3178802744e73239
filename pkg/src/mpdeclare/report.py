"""Log-level statistics and JSON / CSV reports."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .engine import CheckResult
from .eventlog import EventLog

CSV_COLUMNS = ("id", "activations", "violations", "fulfillments",
               "violation_ratio", "fulfillment_ratio", "avg_activation_sparsity")


class AggregationError(ValueError):
    pass


@dataclass(frozen=True)
class ConstraintStats:
    constraint_id: str
    activations: int = 0
    violations: int = 0
    fulfillments: int = 0
    violation_ratio: float = 0.0
    fulfillment_ratio: float = 0.0
    # mean over traces of 1 - activations/events (0 for empty traces); a local
    # definition, the published sparsity column is not reproducible
    avg_activation_sparsity: float = 0.0

    @classmethod
    def from_counts(cls, constraint_id: str, violations: int, fulfillments: int,
                    sparsity: float = 0.0) -> "ConstraintStats":
        activations = violations + fulfillments
        if activations == 0:
            return cls(constraint_id, 0, 0, 0, 0.0, 0.0, sparsity)
        return cls(constraint_id, activations, violations, fulfillments,
                   violations / activations, fulfillments / activations, sparsity)


@dataclass
class LogReport:
    model: str
    log: str
    constraints: list = field(default_factory=list)
    traces: list = field(default_factory=list)
    duration_ms: int = 0

    @property
    def total_violations(self) -> int:
        return sum(s.violations for s in self.constraints)


def compute_stats(results: Iterable[CheckResult], log: EventLog | None = None,
                  constraint_ids: Sequence[str] | None = None) -> list[ConstraintStats]:
    """Aggregate per-trace results into one row per constraint.

    Constraint order follows ``constraint_ids`` when given, else first
    appearance in ``results``. Sparsity needs ``log`` for trace lengths.
    """
    seen = set()
    order = list(constraint_ids or [])
    viol: dict[str, int] = {c: 0 for c in order}
    ful: dict[str, int] = {c: 0 for c in order}
    sparsity_sum: dict[str, float] = {c: 0.0 for c in order}
    lengths = {t.case_id: len(t.events) for t in log.traces} if log is not None else {}

    for r in results:
        key = (r.case_id, r.constraint_id)
        if key in seen:
            raise AggregationError(f"duplicate result for case {r.case_id!r}, constraint {r.constraint_id!r}")
        seen.add(key)
        if r.constraint_id not in viol:
            order.append(r.constraint_id)
            viol[r.constraint_id] = ful[r.constraint_id] = 0
            sparsity_sum[r.constraint_id] = 0.0
        viol[r.constraint_id] += len(r.violations)
        ful[r.constraint_id] += len(r.fulfillments)
        n = lengths.get(r.case_id, 0)
        if n:
            sparsity_sum[r.constraint_id] += 1.0 - (len(r.violations) + len(r.fulfillments)) / n

    n_traces = len(log.traces) if log is not None else 0
    return [
        ConstraintStats.from_counts(c, viol[c], ful[c], sparsity_sum[c] / n_traces if n_traces else 0.0)
        for c in order
    ]


def build_report(log: EventLog, model, results: Sequence[CheckResult], duration_ms: int = 0) -> LogReport:
    stats = compute_stats(results, log, [c.id for c in model.constraints])
    return LogReport(model.name, log.source_name, stats, list(results), int(duration_ms))


# -- JSON ---------------------------------------------------------------------

def report_to_dict(report: LogReport) -> dict:
    return {
        "model": report.model,
        "log": report.log,
        "duration_ms": report.duration_ms,
        "constraints": [
            {
                "id": s.constraint_id,
                "activations": s.activations,
                "violations": s.violations,
                "fulfillments": s.fulfillments,
                "violation_ratio": s.violation_ratio,
                "fulfillment_ratio": s.fulfillment_ratio,
                "avg_activation_sparsity": s.avg_activation_sparsity,
            }
            for s in report.constraints
        ],
        "traces": [
            {
                "case_id": r.case_id,
                "constraint_id": r.constraint_id,
                "fulfillments": sorted(r.fulfillments),
                "violations": sorted(r.violations),
            }
            for r in report.traces
        ],
    }


def render_json(report: LogReport, indent: int | None = 2) -> bytes:
    return json.dumps(report_to_dict(report), indent=indent, ensure_ascii=False).encode("utf-8")


def parse_report_json(data: bytes | str) -> LogReport:
    doc = json.loads(data)
    stats = [
        ConstraintStats(c["id"], c["activations"], c["violations"], c["fulfillments"],
                        float(c["violation_ratio"]), float(c["fulfillment_ratio"]),
                        float(c["avg_activation_sparsity"]))
        for c in doc["constraints"]
    ]
    traces = [
        CheckResult(t["case_id"], t["constraint_id"], frozenset(t["fulfillments"]), frozenset(t["violations"]))
        for t in doc["traces"]
    ]
    return LogReport(doc["model"], doc["log"], stats, traces, int(doc["duration_ms"]))


# -- CSV / text ---------------------------------------------------------------

def _row(s: ConstraintStats) -> list[str]:
    return [s.constraint_id, str(s.activations), str(s.violations), str(s.fulfillments),
            f"{s.violation_ratio:.4f}", f"{s.fulfillment_ratio:.4f}", f"{s.avg_activation_sparsity:.4f}"]


def render_csv(report: LogReport) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_COLUMNS)
    for s in report.constraints:
        w.writerow(_row(s))
    return buf.getvalue().encode("utf-8")


def summary_table(report: LogReport) -> str:
    # same column order as the published result tables
    header = ["Id", "Act.no.", "Viol.no.", "Fulfill.no.", "Avg.act.sparsity", "Viol.ratio", "Fulfill.ratio"]
    rows = [header]
    for s in report.constraints:
        r = _row(s)
        rows.append(r[:4] + [r[6], r[4], r[5]])
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in rows)
