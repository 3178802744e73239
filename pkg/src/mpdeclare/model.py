"""MP-Declare templates, constraints, models and the textual model format.

One constraint per line::

    # id: Template[first params; second params] | activation | correlation | time
    Response[A_SUBMITTED; A_ACCEPTED] | - | - | 0,24,h
    7: Precedence[ca-125 using meia; outpatient follow-up consultation] | A.Diagnosis == 'x' | - | 0,15,d

Parameters are written in Declare order: for precedence-like templates the
first list is the target (the activity that must come first) and the second
the activation. Conditions always say ``A.`` for the activation event and
``T.`` for the target event.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .conditions import (
    ACTIVATION,
    CORRELATION,
    TRUE,
    UNBOUNDED,
    ConditionPolicyError,
    ConditionSyntaxError,
    TimeWindow,
    parse_condition,
    parse_time_window,
    refs,
    render_condition,
    render_time_window,
)
from .eventlog import EventLog

FORWARD = "forward"
BACKWARD = "backward"
BIDIRECTIONAL = "bidirectional"


class Template(enum.Enum):
    RESPONDED_EXISTENCE = "responded_existence"
    RESPONSE = "response"
    ALTERNATE_RESPONSE = "alternate_response"
    CHAIN_RESPONSE = "chain_response"
    PRECEDENCE = "precedence"
    ALTERNATE_PRECEDENCE = "alternate_precedence"
    CHAIN_PRECEDENCE = "chain_precedence"
    NOT_RESPONDED_EXISTENCE = "not_responded_existence"
    NOT_RESPONSE = "not_response"
    NOT_PRECEDENCE = "not_precedence"
    NOT_CHAIN_RESPONSE = "not_chain_response"
    NOT_CHAIN_PRECEDENCE = "not_chain_precedence"

    @property
    def is_negative(self) -> bool:
        return self.value.startswith("not")

    @property
    def positive_counterpart(self) -> "Template | None":
        if not self.is_negative:
            return None
        return Template(self.value[len("not_"):])

    @property
    def direction(self) -> str:
        base = self.positive_counterpart or self
        if base is Template.RESPONDED_EXISTENCE:
            return BIDIRECTIONAL
        if base.value.endswith("precedence"):
            return BACKWARD
        return FORWARD

    @property
    def dsl_name(self) -> str:
        return "".join(w.capitalize() for w in self.value.split("_"))

    @classmethod
    def from_name(cls, name: str) -> "Template":
        key = re.sub(r"[\s_\-]", "", name).lower()
        for t in cls:
            if t.value.replace("_", "") == key:
                return t
        raise ValueError(f"unknown template {name!r}")


POSITIVE_TEMPLATES = tuple(t for t in Template if not t.is_negative)
NEGATIVE_TEMPLATES = tuple(t for t in Template if t.is_negative)


@dataclass(frozen=True)
class Constraint:
    id: str
    template: Template
    activations: frozenset
    targets: frozenset
    activation_condition: object = TRUE
    correlation_condition: object = TRUE
    time_condition: TimeWindow = UNBOUNDED

    def __post_init__(self):
        if not self.activations or not self.targets:
            raise ValueError(f"constraint {self.id}: activation and target sets must be non-empty")
        if any(r.side == "T" for r in refs(self.activation_condition)):
            raise ConditionPolicyError(f"constraint {self.id}: activation condition references T.")

    @classmethod
    def build(cls, template, first, second, activation="-", correlation="-", time="-", id="c"):
        """Convenience constructor taking parameters in DSL order and condition text."""
        if isinstance(template, str):
            template = Template.from_name(template)
        first = frozenset([first] if isinstance(first, str) else first)
        second = frozenset([second] if isinstance(second, str) else second)
        acts, tgts = (second, first) if template.direction == BACKWARD else (first, second)
        return cls(
            id, template, acts, tgts,
            parse_condition(activation, ACTIVATION) if isinstance(activation, str) else activation,
            parse_condition(correlation, CORRELATION) if isinstance(correlation, str) else correlation,
            parse_time_window(time) if isinstance(time, str) else time,
        )

    def with_template(self, template: Template) -> "Constraint":
        return Constraint(self.id, template, self.activations, self.targets,
                          self.activation_condition, self.correlation_condition, self.time_condition)


@dataclass(frozen=True)
class Model:
    constraints: tuple = ()
    name: str = ""

    def __post_init__(self):
        ids = [c.id for c in self.constraints]
        dupes = {i for i in ids if ids.count(i) > 1}
        if dupes:
            raise ValueError(f"duplicate constraint ids: {sorted(dupes)}")

    def __iter__(self):
        return iter(self.constraints)

    def __len__(self):
        return len(self.constraints)


class ModelParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


_HEAD = re.compile(r"^\s*(?:(?P<id>[\w.\-]+)\s*:\s*)?(?P<name>[A-Za-z][A-Za-z _]*?)\s*\[(?P<params>[^\]]*)\]\s*(?P<rest>.*)$")


def _split_fields(text: str) -> list[str]:
    """Split on ``|`` outside quoted strings."""
    out, buf, quote = [], [], None
    i = 0
    while i < len(text):
        ch = text[i]
        if quote:
            buf.append(ch)
            if ch == "\\" and i + 1 < len(text):
                buf.append(text[i + 1])
                i += 1
            elif ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
            buf.append(ch)
        elif ch == "|":
            out.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
        i += 1
    out.append("".join(buf))
    return [s.strip() for s in out]


def _activity_set(text: str, line: int, which: str) -> frozenset:
    names = [a.strip() for a in text.split(",")]
    if not names or any(not a for a in names):
        raise ModelParseError(line, f"empty {which} parameter list")
    return frozenset(names)


def parse_constraint_line(text: str, line: int = 1) -> Constraint:
    m = _HEAD.match(text)
    if m is None:
        raise ModelParseError(line, f"cannot parse constraint {text.strip()!r}")
    try:
        template = Template.from_name(m.group("name"))
    except ValueError as exc:
        raise ModelParseError(line, str(exc)) from None
    params = m.group("params").split(";")
    if len(params) != 2:
        raise ModelParseError(line, "parameters must be '<first>; <second>'")
    first = _activity_set(params[0], line, "first")
    second = _activity_set(params[1], line, "second")

    rest = m.group("rest").strip()
    fields = _split_fields(rest[1:]) if rest.startswith("|") else ([] if not rest else None)
    if fields is None or len(fields) > 3:
        raise ModelParseError(line, "expected '| activation | correlation | time' after parameters")
    fields += ["-"] * (3 - len(fields))
    try:
        act = parse_condition(fields[0] or "-", ACTIVATION)
        corr = parse_condition(fields[1] or "-", CORRELATION)
    except (ConditionSyntaxError, ConditionPolicyError) as exc:
        raise ModelParseError(line, str(exc)) from None
    try:
        window = parse_time_window(fields[2] or "-")
    except ValueError as exc:
        raise ModelParseError(line, str(exc)) from None
    return Constraint.build(template, first, second, act, corr, window, id=m.group("id") or str(line))


def parse_model(text: str, name: str = "") -> Model:
    constraints = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.strip()
        if not body or body.startswith("#"):
            continue
        constraints.append(parse_constraint_line(body, lineno))
    try:
        return Model(tuple(constraints), name)
    except ValueError as exc:
        raise ModelParseError(0, str(exc)) from None


def read_model(path: str) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), name=path)


def dsl_params(c: Constraint) -> tuple[frozenset, frozenset]:
    if c.template.direction == BACKWARD:
        return c.targets, c.activations
    return c.activations, c.targets


def render_constraint(c: Constraint, with_id: bool = True) -> str:
    first, second = dsl_params(c)
    head = f"{c.id}: " if with_id else ""
    return (f"{head}{c.template.dsl_name}[{', '.join(sorted(first))}; {', '.join(sorted(second))}]"
            f" | {render_condition(c.activation_condition)}"
            f" | {render_condition(c.correlation_condition)}"
            f" | {render_time_window(c.time_condition)}")


def render_model(model: Model) -> str:
    return "".join(render_constraint(c) + "\n" for c in model.constraints)


def validate_model(model: Model, log: EventLog) -> list[str]:
    """Non-fatal checks of a model against a log."""
    activities = set()
    attributes = set()
    for t in log.traces:
        attributes.update(t.case_attributes)
        for e in t.events:
            activities.add(e.activity)
            attributes.update(e.attributes)

    warnings = []
    for c in model.constraints:
        for act in sorted(c.activations | c.targets):
            if act not in activities:
                warnings.append(f"constraint {c.id}: activity {act!r} never occurs in the log")
        names = {r.name for r in refs(c.activation_condition) | refs(c.correlation_condition)}
        for attr in sorted(names - attributes):
            warnings.append(f"constraint {c.id}: attribute {attr!r} never appears in the log")
        if c.activations & c.targets:
            warnings.append(
                f"constraint {c.id}: activities {sorted(c.activations & c.targets)} are both "
                "activation and target; results follow the procedure call order"
            )
    return warnings
