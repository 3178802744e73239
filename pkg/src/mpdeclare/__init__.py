"""Conformance checking of event logs against MP-Declare models."""
from .conditions import TimeWindow, parse_condition, parse_time_window
from .engine import CheckResult, check_log_conformance, check_trace_conformance, invert_negative
from .eventlog import Event, EventLog, Timestamp, Trace, make_trace, parse_json_log, parse_xes, payload_at
from .model import Constraint, Model, Template, parse_model
from .oracle import oracle_classify, oracle_satisfies
from .report import ConstraintStats, LogReport, build_report, compute_stats, render_csv, render_json

__all__ = [
    "TimeWindow", "parse_condition", "parse_time_window",
    "CheckResult", "check_log_conformance", "check_trace_conformance", "invert_negative",
    "Event", "EventLog", "Timestamp", "Trace", "make_trace", "parse_json_log", "parse_xes", "payload_at",
    "Constraint", "Model", "Template", "parse_model",
    "oracle_classify", "oracle_satisfies",
    "ConstraintStats", "LogReport", "build_report", "compute_stats", "render_csv", "render_json",
]
