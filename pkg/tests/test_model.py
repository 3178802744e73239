import pytest
from hypothesis import given, strategies as st

from mpdeclare.conditions import TRUE, Compare, Literal, Ref, parse_time_window
from mpdeclare.eventlog import EventLog
from mpdeclare.model import (
    BACKWARD,
    BIDIRECTIONAL,
    FORWARD,
    NEGATIVE_TEMPLATES,
    POSITIVE_TEMPLATES,
    Constraint,
    Model,
    ModelParseError,
    Template,
    parse_model,
    render_model,
    validate_model,
)

from conftest import mk

BPI_2012 = "Response[A_SUBMITTED; A_ACCEPTED] | - | - | 0,24,h"
HOSPITAL = ("Precedence[ca-125 using meia; outpatient follow-up consultation] "
            "| A.Diagnosis == 'maligniteit ovarium or tuba' | - | 0,15,d")
RABOBANK = "NotResponse[Open; Reopen] | - | A.org:resource != T.org:resource | -"


class TestTemplates:
    def test_twelve(self):
        assert len(Template) == 12
        assert len(POSITIVE_TEMPLATES) == 7 and len(NEGATIVE_TEMPLATES) == 5

    @pytest.mark.parametrize("t", list(Template))
    def test_negative_counterpart(self, t):
        assert t.is_negative == t.value.startswith("not")
        if t.is_negative:
            p = t.positive_counterpart
            assert not p.is_negative
            assert t.direction == p.direction
        else:
            assert t.positive_counterpart is None

    def test_directions(self):
        assert Template.RESPONSE.direction == FORWARD
        assert Template.CHAIN_PRECEDENCE.direction == BACKWARD
        assert Template.NOT_RESPONDED_EXISTENCE.direction == BIDIRECTIONAL

    @pytest.mark.parametrize("name", ["NotChainResponse", "not chain response", "not_chain_response", "NOTCHAINRESPONSE"])
    def test_name_forms(self, name):
        assert Template.from_name(name) is Template.NOT_CHAIN_RESPONSE


class TestParseModel:
    def test_bpi_2012_response(self):
        (c,) = parse_model(BPI_2012).constraints
        assert c.template is Template.RESPONSE
        assert c.activations == {"A_SUBMITTED"} and c.targets == {"A_ACCEPTED"}
        assert c.activation_condition is TRUE and c.correlation_condition is TRUE
        assert c.time_condition == parse_time_window("0,24,h")
        assert c.time_condition.upper == 86_400_000

    def test_hospital_precedence(self):
        (c,) = parse_model(HOSPITAL).constraints
        assert c.template is Template.PRECEDENCE
        # precedence activates on the later event
        assert c.activations == {"outpatient follow-up consultation"}
        assert c.targets == {"ca-125 using meia"}
        assert c.activation_condition == Compare(Ref("A", "Diagnosis"), "==", Literal("maligniteit ovarium or tuba"))
        assert c.time_condition.upper == 1_296_000_000

    def test_rabobank_not_response(self):
        (c,) = parse_model(RABOBANK).constraints
        assert c.template is Template.NOT_RESPONSE
        assert c.activations == {"Open"} and c.targets == {"Reopen"}
        assert c.correlation_condition == Compare(Ref("A", "org:resource"), "!=", Ref("T", "org:resource"))

    def test_ids_and_order(self):
        m = parse_model(f"# comment\n{BPI_2012}\n\nr16: {RABOBANK}\n{HOSPITAL}\n")
        assert [c.id for c in m.constraints] == ["2", "r16", "5"]
        assert [c.template for c in m.constraints] == [Template.RESPONSE, Template.NOT_RESPONSE, Template.PRECEDENCE]

    def test_sets_and_quoted_pipe(self):
        (c,) = parse_model("ChainResponse[a, b c; d] | A.x == 'p|q' | - | -").constraints
        assert c.activations == {"a", "b c"}
        assert c.activation_condition.right == Literal("p|q")

    @pytest.mark.parametrize("line,fragment", [
        ("Foo[a; b] | - | - | -", "unknown template"),
        ("Response[; b] | - | - | -", "empty"),
        ("Response[a; b] | A.x == | - | -", "position"),
        ("Response[a; b] | T.x == 1 | - | -", "T"),
        ("Response[a; b] | - | - | 0,1,w", "unit"),
        ("Response[a, b] | - | - | -", "parameters"),
        ("Response[a; b] | - | - | - | -", "expected"),
    ])
    def test_errors_cite_line(self, line, fragment):
        text = f"{BPI_2012}\n{BPI_2012}\n{line}\n"
        with pytest.raises(ModelParseError) as info:
            parse_model(text)
        assert info.value.line == 3
        assert "line 3" in str(info.value)
        assert fragment in str(info.value)

    def test_trailing_fields_optional(self):
        (c,) = parse_model("Response[a; b]").constraints
        assert c == parse_model("Response[a; b] | - | - | -").constraints[0]

    def test_duplicate_ids(self):
        with pytest.raises(ModelParseError, match="duplicate"):
            parse_model(f"x: {BPI_2012}\nx: {RABOBANK}\n")

    def test_constraint_invariants(self):
        with pytest.raises(ValueError):
            Constraint("c", Template.RESPONSE, frozenset(), frozenset({"b"}))
        with pytest.raises(ValueError):
            Model((Constraint.build("response", "a", "b", id="1"), Constraint.build("response", "a", "c", id="1")))


@given(st.lists(st.sampled_from([BPI_2012, HOSPITAL, RABOBANK,
                                 "AlternatePrecedence[x; y, z] | A.k > 2.5 | not (A.k == T.k) | 1,*,m"]),
                min_size=0, max_size=6))
def test_render_parse_fixpoint(lines):
    m = parse_model("\n".join(lines))
    again = parse_model(render_model(m))
    assert again == m


class TestValidate:
    LOG = EventLog((mk(("Open", 0, {"org:resource": "u1"}), ("Reopen", 1)),))

    def test_clean(self):
        assert validate_model(parse_model(RABOBANK), self.LOG) == []

    def test_unknown_activity(self):
        w = validate_model(parse_model("Response[Open; zzz] | - | - | -"), self.LOG)
        assert len(w) == 1 and "zzz" in w[0]

    def test_unknown_attribute(self):
        w = validate_model(parse_model("Response[Open; Reopen] | A.never == 1 | - | -"), self.LOG)
        assert len(w) == 1 and "never" in w[0]
