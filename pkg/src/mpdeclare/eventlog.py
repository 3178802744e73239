"""Event logs: in-memory model, XES / JSON ingestion and payload snapshots.

Attribute values are plain Python objects. The five kinds map to ``str``,
``int``, ``float``, ``bool`` and :class:`Timestamp` (an ``int`` subclass
holding epoch milliseconds, used for XES ``date`` attributes).
"""
from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import IO, Any, Iterable, Mapping, Union

ACTIVITY_KEY = "concept:name"
TIMESTAMP_KEY = "time:timestamp"
LIFECYCLE_KEY = "lifecycle:transition"
_RESERVED_EVENT_KEYS = (ACTIVITY_KEY, TIMESTAMP_KEY, LIFECYCLE_KEY)

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
_MS = timedelta(milliseconds=1)


class Timestamp(int):
    """Epoch-millisecond value of a ``date`` attribute."""

    def __repr__(self) -> str:
        return f"Timestamp({int(self)})"


AttributeValue = Union[str, int, float, bool, Timestamp]
PayloadSnapshot = Mapping[str, AttributeValue]


def value_kind(value: Any) -> str:
    # bool before int: bool is an int subclass
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, Timestamp):
        return "timestamp"
    if isinstance(value, int):
        return "integer"
    if isinstance(value, float):
        return "real"
    if isinstance(value, str):
        return "text"
    raise TypeError(f"unsupported attribute value {value!r}")


class LogParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class LogValidationError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Event:
    activity: str
    timestamp: int
    attributes: Mapping[str, AttributeValue] = field(default_factory=dict)
    index: int = 0


@dataclass(frozen=True, slots=True)
class Trace:
    case_id: str
    events: tuple[Event, ...] = ()
    case_attributes: Mapping[str, AttributeValue] = field(default_factory=dict)

    def __post_init__(self):
        for pos, e in enumerate(self.events):
            if e.index != pos:
                raise LogValidationError(
                    f"trace {self.case_id!r}: event at position {pos} has index {e.index}"
                )
            if not e.activity:
                raise LogValidationError(f"trace {self.case_id!r}: empty activity at {pos}")
        for pos in range(1, len(self.events)):
            if self.events[pos - 1].timestamp > self.events[pos].timestamp:
                raise LogValidationError(
                    f"trace {self.case_id!r}: timestamps decrease at position {pos} "
                    f"({self.events[pos - 1].timestamp} > {self.events[pos].timestamp})"
                )

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True, slots=True)
class EventLog:
    traces: tuple[Trace, ...] = ()
    source_name: str = field(default="", compare=False)

    def __post_init__(self):
        seen = set()
        for t in self.traces:
            if t.case_id in seen:
                raise LogValidationError(f"duplicate case id {t.case_id!r}")
            seen.add(t.case_id)

    def __len__(self) -> int:
        return len(self.traces)

    @property
    def num_events(self) -> int:
        return sum(len(t.events) for t in self.traces)


def make_trace(
    case_id: str,
    events: Iterable[tuple[str, int] | tuple[str, int, Mapping[str, AttributeValue]]],
    case_attributes: Mapping[str, AttributeValue] | None = None,
    sort_on_load: bool = False,
) -> Trace:
    """Build a trace from ``(activity, timestamp[, attributes])`` tuples, assigning indices."""
    rows = [(r[0], r[1], dict(r[2]) if len(r) > 2 else {}) for r in events]
    if sort_on_load:
        rows.sort(key=lambda r: r[1])  # stable: ties keep file order
    evs = tuple(Event(a, t, attrs, i) for i, (a, t, attrs) in enumerate(rows))
    return Trace(case_id, evs, dict(case_attributes or {}))


def payloads(trace: Trace) -> list[dict[str, AttributeValue]]:
    """Effective payload for every position of ``trace``.

    Consecutive positions without attribute writes share the same dict, so the
    returned mappings must be treated as read-only.
    """
    snap = dict(trace.case_attributes)
    out = []
    for e in trace.events:
        if e.attributes:
            snap = {**snap, **e.attributes}
        out.append(snap)
    return out


def payload_at(trace: Trace, index: int) -> PayloadSnapshot:
    if not 0 <= index < len(trace.events):
        raise IndexError(f"event index {index} out of range for trace of length {len(trace.events)}")
    snap = dict(trace.case_attributes)
    for e in trace.events[: index + 1]:
        snap.update(e.attributes)
    return snap


# -- timestamps ---------------------------------------------------------------

_ISO_FRACTION = re.compile(r"(\.\d+)")


def parse_iso_ms(text: str) -> int:
    """ISO-8601 date-time to epoch milliseconds; naive values are read as UTC."""
    s = text.strip()
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    # fromisoformat on 3.10 only accepts 3 or 6 fractional digits
    m = _ISO_FRACTION.search(s)
    if m:
        frac = m.group(1)[1:]
        s = s[: m.start()] + "." + (frac + "000000")[:6] + s[m.end():]
    try:
        dt = datetime.fromisoformat(s)
    except ValueError as exc:
        raise ValueError(f"invalid ISO-8601 timestamp {text!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return (dt - EPOCH) // _MS


def format_iso_ms(ms: int) -> str:
    dt = EPOCH + timedelta(milliseconds=int(ms))
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{dt.microsecond // 1000:03d}+00:00"


def activity_key(name: str, transition: str | None) -> str:
    if transition is None or transition.lower() == "complete":
        return name
    return f"{name}-{transition}"


# -- XES ----------------------------------------------------------------------

def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _xes_value(elem: ET.Element) -> tuple[str, AttributeValue] | None:
    kind = _local(elem.tag)
    key = elem.get("key")
    raw = elem.get("value")
    if key is None or raw is None:
        return None
    if kind in ("string", "id"):
        return key, raw
    if kind == "int":
        return key, int(raw)
    if kind == "float":
        return key, float(raw)
    if kind == "boolean":
        return key, raw.strip().lower() == "true"
    if kind == "date":
        return key, Timestamp(parse_iso_ms(raw))
    return None


def _attributes(elem: ET.Element) -> dict[str, AttributeValue]:
    out: dict[str, AttributeValue] = {}
    for child in elem:
        if _local(child.tag) in ("trace", "event"):
            continue
        try:
            kv = _xes_value(child)
        except ValueError as exc:
            raise LogParseError(f"bad value for attribute {child.get('key')!r}: {exc}") from exc
        if kv is not None:
            out[kv[0]] = kv[1]
    return out


def parse_xes(source: bytes | IO[bytes], sort_on_load: bool = False, name: str = "") -> EventLog:
    data = source if isinstance(source, (bytes, bytearray)) else source.read()
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, col = exc.position
        raise LogParseError(f"malformed XML: {exc.msg}", line, col) from exc
    if _local(root.tag) != "log":
        raise LogParseError(f"root element is <{_local(root.tag)}>, expected <log>")

    traces = []
    for t_pos, t_elem in enumerate(c for c in root if _local(c.tag) == "trace"):
        case_attrs = _attributes(t_elem)
        case_id = str(case_attrs.pop(ACTIVITY_KEY, t_pos))
        rows = []
        for e_pos, e_elem in enumerate(c for c in t_elem if _local(c.tag) == "event"):
            attrs = _attributes(e_elem)
            act = attrs.pop(ACTIVITY_KEY, None)
            if act is None:
                raise LogValidationError(f"trace {case_id!r}: event {e_pos} has no {ACTIVITY_KEY}")
            ts = attrs.pop(TIMESTAMP_KEY, None)
            if not isinstance(ts, Timestamp):
                raise LogValidationError(f"trace {case_id!r}: event {e_pos} has no date {TIMESTAMP_KEY}")
            lifecycle = attrs.pop(LIFECYCLE_KEY, None)
            rows.append((activity_key(str(act), lifecycle if lifecycle is None else str(lifecycle)),
                         int(ts), attrs))
        traces.append(make_trace(case_id, rows, case_attrs, sort_on_load))
    return EventLog(tuple(traces), name)


# -- JSON ---------------------------------------------------------------------

def _json_attr_value(value: Any, path: str) -> AttributeValue:
    if isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, dict) and set(value) == {"timestamp"} and isinstance(value["timestamp"], int):
        return Timestamp(value["timestamp"])
    raise LogParseError(f"{path}: unsupported attribute value {value!r}")


def _json_attrs(obj: Any, path: str) -> dict[str, AttributeValue]:
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise LogParseError(f"{path}: expected an object")
    return {k: _json_attr_value(v, f"{path}.{k}") for k, v in obj.items()}


def parse_json_log(source: bytes | str | IO, sort_on_load: bool = False, name: str = "") -> EventLog:
    if hasattr(source, "read"):
        source = source.read()
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise LogParseError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("traces"), list):
        raise LogParseError("$.traces: expected a list")

    traces = []
    for ti, t in enumerate(doc["traces"]):
        tp = f"$.traces[{ti}]"
        if not isinstance(t, dict):
            raise LogParseError(f"{tp}: expected an object")
        case_id = t.get("id")
        if not isinstance(case_id, str):
            raise LogParseError(f"{tp}.id: expected a string")
        events = t.get("events", [])
        if not isinstance(events, list):
            raise LogParseError(f"{tp}.events: expected a list")
        rows = []
        for ei, e in enumerate(events):
            ep = f"{tp}.events[{ei}]"
            if not isinstance(e, dict):
                raise LogParseError(f"{ep}: expected an object")
            act, ts = e.get("a"), e.get("t")
            if not isinstance(act, str) or not act:
                raise LogParseError(f"{ep}.a: expected a non-empty string")
            if isinstance(ts, bool) or not isinstance(ts, int):
                raise LogParseError(f"{ep}.t: expected integer milliseconds")
            rows.append((act, ts, _json_attrs(e.get("attrs"), f"{ep}.attrs")))
        traces.append(make_trace(case_id, rows, _json_attrs(t.get("attrs"), f"{tp}.attrs"), sort_on_load))
    return EventLog(tuple(traces), name or str(doc.get("name", "")))


def _json_value(v: AttributeValue) -> Any:
    return {"timestamp": int(v)} if isinstance(v, Timestamp) else v


def log_to_json(log: EventLog) -> dict:
    traces = []
    for t in log.traces:
        events = []
        for e in t.events:
            ev: dict[str, Any] = {"a": e.activity, "t": e.timestamp}
            if e.attributes:
                ev["attrs"] = {k: _json_value(v) for k, v in e.attributes.items()}
            events.append(ev)
        tr: dict[str, Any] = {"id": t.case_id}
        if t.case_attributes:
            tr["attrs"] = {k: _json_value(v) for k, v in t.case_attributes.items()}
        tr["events"] = events
        traces.append(tr)
    return {"name": log.source_name, "traces": traces}


def write_json_log(log: EventLog, sink: IO[bytes]) -> None:
    sink.write(json.dumps(log_to_json(log), ensure_ascii=False).encode("utf-8"))


def read_log(path: str, sort_on_load: bool = False) -> EventLog:
    """Load a ``.xes`` or ``.json`` log from disk, dispatching on the extension."""
    with open(path, "rb") as fh:
        data = fh.read()
    if path.lower().endswith(".json"):
        return parse_json_log(data, sort_on_load, name=path)
    return parse_xes(data, sort_on_load, name=path)
