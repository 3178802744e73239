import math

import pytest
from hypothesis import given, settings, strategies as st

from mpdeclare.conditions import (
    ACTIVATION,
    TRUE,
    And,
    Compare,
    ConditionPolicyError,
    ConditionSyntaxError,
    Literal,
    Not,
    Or,
    Ref,
    TimeContractError,
    TimeWindow,
    UNBOUNDED,
    compare_values,
    compile_condition,
    parse_condition,
    parse_time_window,
    render_condition,
    render_time_window,
    verify_activation,
    verify_correlation,
    verify_time,
)
from mpdeclare.eventlog import Timestamp

HOUR = 3_600_000


class TestParse:
    def test_activation_threshold(self):
        assert parse_condition("A.AMOUNT_REQ >= 10000", ACTIVATION) == Compare(
            Ref("A", "AMOUNT_REQ"), ">=", Literal(10000))

    def test_two_refs(self):
        assert parse_condition("A.org:resource != T.org:resource") == Compare(
            Ref("A", "org:resource"), "!=", Ref("T", "org:resource"))

    def test_dash_is_true(self):
        assert parse_condition("-") is TRUE
        assert parse_condition("  - ", ACTIVATION) is TRUE

    def test_precedence_and_grouping(self):
        e = parse_condition("A.x == 1 or A.y == 2 and not (T.z < 3 or A.w == true)")
        assert isinstance(e, Or)
        assert isinstance(e.items[1], And)
        assert isinstance(e.items[1].items[1], Not)
        assert e.items[1].items[1].operand.items[1] == Compare(Ref("A", "w"), "==", Literal(True))

    def test_literals(self):
        e = parse_condition(r"A.s == 'it\'s' or A.f > -2.5e1 or A.q == false")
        assert e.items[0].right == Literal("it's")
        assert e.items[1].right == Literal(-25.0)
        assert e.items[2].right == Literal(False)

    def test_bare_ident_under_activation_policy(self):
        assert parse_condition("amount > 5", ACTIVATION) == Compare(Ref("A", "amount"), ">", Literal(5))
        with pytest.raises(ConditionSyntaxError):
            parse_condition("amount > 5")

    def test_t_ref_rejected_for_activation(self):
        with pytest.raises(ConditionPolicyError):
            parse_condition("A.x == T.x", ACTIVATION)

    @pytest.mark.parametrize("text,pos", [
        ("A.x ==", 6),
        ("A.x = 3", 4),
        ("(A.x == 1", 9),
        ("A.x == 1 and", 12),
        ("A.x == 1 #", 9),
    ])
    def test_syntax_error_position(self, text, pos):
        with pytest.raises(ConditionSyntaxError) as info:
            parse_condition(text)
        assert info.value.position == pos

    def test_literal_ordering_rejected_at_parse(self):
        with pytest.raises(ConditionSyntaxError):
            parse_condition("'a' < 'b'")
        # numeric literal ordering is fine
        assert parse_condition("1 < 2") == Compare(Literal(1), "<", Literal(2))


class TestVerify:
    def test_hospital_diagnosis(self):
        cond = parse_condition("A.Diagnosis == 'maligniteit ovarium or tuba'", ACTIVATION)
        assert verify_activation(cond, {"Diagnosis": "maligniteit ovarium or tuba"})

    def test_true_any_payload(self):
        assert verify_activation(TRUE, {})
        assert verify_correlation(TRUE, {"x": 1}, {})

    @pytest.mark.parametrize("payload,expected", [({}, False), ({"amount": 9999}, False), ({"amount": 10000}, True)])
    def test_absence_table(self, payload, expected):
        assert verify_activation(parse_condition("A.amount >= 10000", ACTIVATION), payload) is expected

    def test_negated_absent_is_true(self):
        assert verify_activation(parse_condition("not A.x == 5", ACTIVATION), {})

    def test_group_equality(self):
        cond = parse_condition("A.org:group == T.org:group")
        assert verify_correlation(cond, {"org:group": "Radiology"}, {"org:group": "Radiology"})

    def test_resource_inequality_same(self):
        cond = parse_condition("A.org:resource != T.org:resource")
        assert not verify_correlation(cond, {"org:resource": "u1"}, {"org:resource": "u1"})
        assert verify_correlation(cond, {"org:resource": "u1"}, {"org:resource": "u2"})

    @pytest.mark.parametrize("left,op,right,expected", [
        (1, "==", 1.0, True),
        (2, "<", 2.5, True),
        ("1", "==", 1, False),
        ("1", "!=", 1, False),
        (True, "==", 1, False),
        (True, "==", True, True),
        ("a", "<", "b", False),
        ("a", "!=", "b", True),
        (Timestamp(5), "<", Timestamp(6), True),
        (Timestamp(5), "==", 5, False),
        (False, "<", True, False),
    ])
    def test_compare_values(self, left, op, right, expected):
        assert compare_values(left, op, right) is expected

    def test_compiled_shared_by_type(self):
        # Literal(1) and Literal(True) must not share a compiled predicate
        one = compile_condition(Compare(Ref("A", "x"), "==", Literal(1)))
        yes = compile_condition(Compare(Ref("A", "x"), "==", Literal(True)))
        assert one({"x": 1}, {}) and not yes({"x": 1}, {})


class TestTimeWindow:
    def test_hours(self):
        w = parse_time_window("0,24,h")
        assert (w.lower, w.upper, w.declared_unit) == (0, 86_400_000, "h")

    def test_days(self):
        w = parse_time_window("0,15,d")
        assert (w.lower, w.upper) == (0, 1_296_000_000)

    def test_dash(self):
        assert parse_time_window("-") == UNBOUNDED
        assert UNBOUNDED.lower == 0 and UNBOUNDED.upper == math.inf

    def test_star_and_fraction(self):
        w = parse_time_window("1.5,*,m")
        assert (w.lower, w.upper) == (90_000, math.inf)
        assert render_time_window(w) == "1.5,*,m"

    @pytest.mark.parametrize("text", ["0,24,w", "5,5,h", "6,5,h", "-1,5,h", "0,24", "a,b,h"])
    def test_errors(self, text):
        with pytest.raises(ValueError):
            parse_time_window(text)

    def test_invariant_enforced(self):
        with pytest.raises(ValueError):
            TimeWindow(10, 10)

    @pytest.mark.parametrize("window,delta,expected", [
        (TimeWindow(0, 24 * HOUR, "h"), 23 * HOUR, True),
        (TimeWindow(0, 24 * HOUR, "h"), 24 * HOUR, False),
        (UNBOUNDED, 10 ** 15, True),
        (TimeWindow(HOUR, 2 * HOUR, "h"), HOUR - 1, False),
        (TimeWindow(HOUR, 2 * HOUR, "h"), HOUR, True),
    ])
    def test_verify_time(self, window, delta, expected):
        assert verify_time(window, 1000, 1000 + delta) is expected

    def test_order_contract(self):
        with pytest.raises(TimeContractError):
            verify_time(UNBOUNDED, 5, 4)


# -- properties -----------------------------------------------------------

NAMES = ("x", "y", "org:resource", "AMOUNT_REQ")
values = st.one_of(
    st.integers(-5, 5),
    st.floats(-5, 5, allow_nan=False),
    st.sampled_from(["a", "b", "it's", "back\\slash"]),
    st.booleans(),
    st.integers(0, 5).map(Timestamp),
)
literals = values.filter(lambda v: not isinstance(v, Timestamp)).map(Literal)
refs_ = st.builds(Ref, st.sampled_from("AT"), st.sampled_from(NAMES))
operands = st.one_of(refs_, refs_, literals)
ops = st.sampled_from(["==", "!=", "<", "<=", ">", ">="])


def _ok_compare(c):
    both_lit = isinstance(c.left, Literal) and isinstance(c.right, Literal)
    if not both_lit or c.op in ("==", "!="):
        return True
    numeric = (int, float)
    lv, rv = c.left.value, c.right.value
    return (isinstance(lv, numeric) and not isinstance(lv, bool)
            and isinstance(rv, numeric) and not isinstance(rv, bool))


compares = st.builds(Compare, operands, ops, operands).filter(_ok_compare)
exprs = st.recursive(
    compares,
    lambda inner: st.one_of(
        st.builds(Not, inner),
        st.lists(inner, min_size=2, max_size=3).map(lambda xs: And(tuple(xs))),
        st.lists(inner, min_size=2, max_size=3).map(lambda xs: Or(tuple(xs))),
    ),
    max_leaves=8,
)
payloads_ = st.dictionaries(st.sampled_from(NAMES), values, max_size=4)


@settings(max_examples=300)
@given(exprs)
def test_render_parse_round_trip(e):
    assert parse_condition(render_condition(e)) == e


@settings(max_examples=300)
@given(exprs, payloads_, payloads_)
def test_evaluation_total(e, a, t):
    assert compile_condition(e)(a, t) in (True, False)


@given(exprs, exprs, payloads_, payloads_)
def test_de_morgan(p, q, a, t):
    lhs = compile_condition(Not(And((p, q))))(a, t)
    rhs = compile_condition(Or((Not(p), Not(q))))(a, t)
    assert lhs == rhs


@given(st.integers(0, 10 ** 6), st.integers(1, 10 ** 6), st.one_of(st.integers(0, 10 ** 6), st.just(math.inf)),
       st.integers(-10 ** 9, 10 ** 9), st.integers(0, 3 * 10 ** 6))
def test_verify_time_matches_definition(lo, width, hi, a, d):
    upper = hi if hi == math.inf else lo + width
    w = TimeWindow(lo, upper, "s")
    assert verify_time(w, a, a + d) == (d >= w.lower and d < w.upper)
