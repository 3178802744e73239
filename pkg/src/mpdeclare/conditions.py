"""Activation / correlation conditions and time windows.

Conditions are small boolean expressions over attribute references. ``A.x``
reads attribute ``x`` from the activation payload, ``T.x`` from the target
payload::

    A.AMOUNT_REQ >= 10000
    A.org:resource != T.org:resource and not (T.x < 5 or A.flag == true)

Evaluation is total. A comparison touching an absent attribute is false, as
is any comparison across value kinds and any ordering comparison between
non-numeric values (timestamps excepted, they order among themselves).
"""
from __future__ import annotations

import math
import operator
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Union

from .eventlog import AttributeValue, Timestamp, value_kind

ACTIVATION = "activation"
CORRELATION = "correlation"

COMPARATORS = {
    "==": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}
ORDERING = frozenset({"<", "<=", ">", ">="})
_NUMERIC = frozenset({"integer", "real"})
_ORDERED_KINDS = frozenset({"integer", "real", "timestamp"})


class ConditionSyntaxError(ValueError):
    def __init__(self, message: str, text: str = "", position: int = 0):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.position = position


class ConditionPolicyError(ValueError):
    pass


# -- AST ----------------------------------------------------------------------

@dataclass(frozen=True)
class Ref:
    side: str  # "A" or "T"
    name: str


@dataclass(frozen=True, eq=False)
class Literal:
    value: Union[str, int, float, bool]

    # type-aware: Literal(1), Literal(1.0) and Literal(True) are distinct nodes
    def __eq__(self, other):
        return (isinstance(other, Literal) and type(self.value) is type(other.value)
                and self.value == other.value)

    def __hash__(self):
        return hash((type(self.value).__name__, self.value))


@dataclass(frozen=True)
class Compare:
    left: Union[Ref, Literal]
    op: str
    right: Union[Ref, Literal]


@dataclass(frozen=True)
class And:
    items: tuple


@dataclass(frozen=True)
class Or:
    items: tuple


@dataclass(frozen=True)
class Not:
    operand: object


@dataclass(frozen=True)
class TrueConst:
    pass


TRUE = TrueConst()
ConditionExpr = Union[Compare, And, Or, Not, TrueConst]


def refs(expr) -> set[Ref]:
    if isinstance(expr, Compare):
        return {x for x in (expr.left, expr.right) if isinstance(x, Ref)}
    if isinstance(expr, (And, Or)):
        return set().union(*(refs(i) for i in expr.items))
    if isinstance(expr, Not):
        return refs(expr.operand)
    return set()


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op>==|!=|<=|>=|<|>)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<str>'(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*")
  | (?P<num>[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
  | (?P<ref>[AT]\.[A-Za-z_][\w:]*)
  | (?P<ident>[A-Za-z_][\w:]*)
    """,
    re.VERBOSE,
)
_KEYWORDS = {"and", "or", "not", "true", "false"}
_ESCAPE = re.compile(r"\\(.)")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ConditionSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "ident" and value.lower() in _KEYWORDS:
                kind = value.lower()
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, policy: str):
        self.text = text
        self.policy = policy
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self, kind: str | None = None) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            self.fail(f"expected {kind}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def fail(self, message: str, position: int):
        raise ConditionSyntaxError(message, self.text, position)

    def parse(self):
        expr = self.or_expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}", self.peek()[2])
        return expr

    def or_expr(self):
        items = [self.and_expr()]
        while self.peek()[0] == "or":
            self.take()
            items.append(self.and_expr())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def and_expr(self):
        items = [self.unary()]
        while self.peek()[0] == "and":
            self.take()
            items.append(self.unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def unary(self):
        if self.peek()[0] == "not":
            self.take()
            return Not(self.atom())
        return self.atom()

    def atom(self):
        if self.peek()[0] == "lpar":
            self.take()
            expr = self.or_expr()
            self.take("rpar")
            return expr
        left = self.operand()
        op_tok = self.take("op")
        right = self.operand()
        if (op_tok[1] in ORDERING and isinstance(left, Literal) and isinstance(right, Literal)
                and not (value_kind(left.value) in _NUMERIC and value_kind(right.value) in _NUMERIC)):
            self.fail(f"ordering comparison {op_tok[1]!r} between non-numeric literals", op_tok[2])
        return Compare(left, op_tok[1], right)

    def operand(self):
        kind, value, pos = self.take()
        if kind == "ref":
            side, name = value[0], value[2:]
            if side == "T" and self.policy == ACTIVATION:
                raise ConditionPolicyError(
                    f"target reference {value!r} not allowed in an activation condition"
                )
            return Ref(side, name)
        if kind == "ident":
            if self.policy != ACTIVATION:
                self.fail(f"attribute {value!r} needs an A. or T. prefix", pos)
            return Ref("A", value)
        if kind == "num":
            number = float(value) if any(c in value for c in ".eE") else int(value)
            return Literal(number)
        if kind == "str":
            return Literal(_ESCAPE.sub(r"\1", value[1:-1]))
        if kind in ("true", "false"):
            return Literal(kind == "true")
        self.fail(f"expected an operand, found {value or 'end of input'!r}", pos)


def parse_condition(text: str, side_policy: str = CORRELATION) -> ConditionExpr:
    if side_policy not in (ACTIVATION, CORRELATION):
        raise ValueError(f"unknown side policy {side_policy!r}")
    if text.strip() == "-":
        return TRUE
    return _Parser(text, side_policy).parse()


# -- rendering ----------------------------------------------------------------

def _render_operand(x) -> str:
    if isinstance(x, Ref):
        return f"{x.side}.{x.name}"
    v = x.value
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return "'" + v.replace("\\", "\\\\").replace("'", "\\'") + "'"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else "0"
    return str(v)


def render_condition(expr) -> str:
    if isinstance(expr, TrueConst):
        return "-"
    return _render(expr)


def _render(expr) -> str:
    if isinstance(expr, Compare):
        return f"{_render_operand(expr.left)} {expr.op} {_render_operand(expr.right)}"
    if isinstance(expr, And):
        return " and ".join(_render_inner(i, And) for i in expr.items)
    if isinstance(expr, Or):
        return " or ".join(_render_inner(i, Or) for i in expr.items)
    if isinstance(expr, Not):
        inner = expr.operand
        return "not " + (_render(inner) if isinstance(inner, Compare) else f"({_render(inner)})")
    if isinstance(expr, TrueConst):
        # only reachable when TRUE is nested; keep it parseable
        return "1 == 1"
    raise TypeError(f"not a condition node: {expr!r}")


def _render_inner(expr, parent) -> str:
    if isinstance(expr, (And, Or)):
        return f"({_render(expr)})"
    return _render(expr)


# -- evaluation ---------------------------------------------------------------

def compare_values(left: AttributeValue, op: str, right: AttributeValue) -> bool:
    lk, rk = value_kind(left), value_kind(right)
    if lk in _NUMERIC and rk in _NUMERIC:
        return COMPARATORS[op](left, right)
    if lk != rk:
        return False
    if op in ORDERING and lk not in _ORDERED_KINDS:
        return False
    return COMPARATORS[op](left, right)


_MISSING = object()
Predicate = Callable[[Mapping, Mapping], bool]


def _operand_getter(x):
    if isinstance(x, Literal):
        value = x.value
        return lambda a, t: value
    name = x.name
    if x.side == "A":
        return lambda a, t: a.get(name, _MISSING)
    return lambda a, t: t.get(name, _MISSING)


def _compile(expr) -> Predicate:
    if isinstance(expr, TrueConst):
        return lambda a, t: True
    if isinstance(expr, Compare):
        left, right, op = _operand_getter(expr.left), _operand_getter(expr.right), expr.op

        def cmp(a, t):
            lv = left(a, t)
            if lv is _MISSING:
                return False
            rv = right(a, t)
            if rv is _MISSING:
                return False
            return compare_values(lv, op, rv)
        return cmp
    if isinstance(expr, And):
        parts = [_compile(i) for i in expr.items]
        return lambda a, t: all(p(a, t) for p in parts)
    if isinstance(expr, Or):
        parts = [_compile(i) for i in expr.items]
        return lambda a, t: any(p(a, t) for p in parts)
    if isinstance(expr, Not):
        inner = _compile(expr.operand)
        return lambda a, t: not inner(a, t)
    raise TypeError(f"not a condition node: {expr!r}")


@lru_cache(maxsize=4096)
def compile_condition(expr) -> Predicate:
    """Turn an AST into a ``(activation_payload, target_payload) -> bool`` closure."""
    return _compile(expr)


_EMPTY: Mapping = {}


def verify_activation(cond, activation_payload: Mapping) -> bool:
    return compile_condition(cond)(activation_payload, _EMPTY)


def verify_correlation(cond, activation_payload: Mapping, target_payload: Mapping) -> bool:
    return compile_condition(cond)(activation_payload, target_payload)


# -- time windows -------------------------------------------------------------

UNIT_MS = {"s": 1_000, "m": 60_000, "h": 3_600_000, "d": 86_400_000}


class TimeContractError(RuntimeError):
    """Raised when a time pair is passed in the wrong orientation."""


@dataclass(frozen=True)
class TimeWindow:
    lower: int = 0
    upper: float = math.inf  # exclusive; int milliseconds or inf
    declared_unit: str = "s"

    def __post_init__(self):
        if self.declared_unit not in UNIT_MS:
            raise ValueError(f"unknown time unit {self.declared_unit!r}")
        if not 0 <= self.lower < self.upper:
            raise ValueError(f"time window needs 0 <= lower < upper, got [{self.lower}, {self.upper})")

    @property
    def unbounded(self) -> bool:
        return self.lower == 0 and self.upper == math.inf

    def contains(self, delta: int) -> bool:
        return self.lower <= delta < self.upper


UNBOUNDED = TimeWindow()


def _to_ms(raw: str, unit: str, text: str) -> int:
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"bad time bound {raw!r} in {text!r}") from None
    if value < 0 or not math.isfinite(value):
        raise ValueError(f"time bound must be a non-negative number, got {raw!r} in {text!r}")
    return round(value * UNIT_MS[unit])


def parse_time_window(text: str) -> TimeWindow:
    text = text.strip()
    if text == "-":
        return UNBOUNDED
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"time condition must be 'lower,upper,unit', got {text!r}")
    lo, hi, unit = parts
    if unit not in UNIT_MS:
        raise ValueError(f"unknown time unit {unit!r} in {text!r}")
    lower = _to_ms(lo, unit, text)
    upper = math.inf if hi == "*" else _to_ms(hi, unit, text)
    if lower >= upper:
        raise ValueError(f"time condition lower bound must be below upper bound in {text!r}")
    return TimeWindow(lower, upper, unit)


def render_time_window(w: TimeWindow) -> str:
    if w.unbounded:
        return "-"
    f = UNIT_MS[w.declared_unit]

    def fmt(ms):
        q = ms / f
        return str(int(q)) if q == int(q) else repr(q)
    upper = "*" if w.upper == math.inf else fmt(w.upper)
    return f"{fmt(w.lower)},{upper},{w.declared_unit}"


def verify_time(window: TimeWindow, earlier_ts: int, later_ts: int) -> bool:
    if earlier_ts > later_ts:
        raise TimeContractError(f"time pair out of order: {earlier_ts} > {later_ts}")
    return window.lower <= later_ts - earlier_ts < window.upper


__all__ = [
    "ACTIVATION", "CORRELATION", "Ref", "Literal", "Compare", "And", "Or", "Not", "TrueConst",
    "TRUE", "ConditionExpr", "ConditionSyntaxError", "ConditionPolicyError", "parse_condition",
    "render_condition", "compile_condition", "verify_activation", "verify_correlation",
    "compare_values", "refs", "TimeWindow", "UNBOUNDED", "parse_time_window",
    "render_time_window", "verify_time", "TimeContractError", "Timestamp",
]
