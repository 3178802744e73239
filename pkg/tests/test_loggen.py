import io

import pytest
from hypothesis import given, settings, strategies as st

from mpdeclare.conditions import TRUE
from mpdeclare.eventlog import EventLog, Timestamp, make_trace, parse_xes
from mpdeclare.loggen import (
    AttributeSpec,
    GenSpec,
    MODEL_FAMILIES,
    bench_spec,
    generate,
    generate_trace,
    iter_traces,
    random_test_log,
    write_xes,
)
from mpdeclare.model import Template

ALL_KINDS = (
    AttributeSpec("i", "integer", -5, 5),
    AttributeSpec("r", "real", 0, 1, write_probability=0.5),
    AttributeSpec("b", "boolean"),
    AttributeSpec("s", "text", choices=("x", "y & <z>")),
    AttributeSpec("d", "timestamp", 0, 10 ** 12),
    AttributeSpec("g", "text", scope="case"),
)


def test_bench_cell_event_count():
    log = generate(bench_spec(25_000, 10))
    assert len(log) == 25_000
    assert log.num_events == 250_000


def test_largest_cell_shape():
    spec = bench_spec(100_000, 50)
    assert spec.traces * spec.events_per_trace == 5_000_000
    for t in iter_traces(spec, start=99_990):
        assert len(t.events) == 50
    assert generate_trace(spec, 99_999).case_id == "case_99999"


def test_same_seed_same_log():
    spec = GenSpec(30, 12, attribute_specs=ALL_KINDS, seed=42)
    assert generate(spec) == generate(spec)


def test_seed_changes_log():
    a = generate(GenSpec(10, 10, seed=1))
    b = generate(GenSpec(10, 10, seed=2))
    assert a != b


def test_trace_independent_of_batch():
    spec = GenSpec(20, 8, attribute_specs=ALL_KINDS, seed=5)
    whole = generate(spec)
    assert list(iter_traces(spec, 10, 15)) == list(whole.traces[10:15])


@pytest.mark.parametrize("bad", [
    GenSpec(-1, 5),
    GenSpec(1, 5, alphabet=()),
    GenSpec(1, 5, inter_event_gap=(10, 5)),
    GenSpec(1, 5, min_events_per_trace=6),
    GenSpec(1, 5, attribute_specs=(AttributeSpec("x", scope="trace"),)),
])
def test_invalid_spec(bad):
    with pytest.raises(ValueError):
        generate(bad)


def test_zero_events_needs_no_alphabet():
    log = generate(GenSpec(3, 0, alphabet=()))
    assert log.num_events == 0 and len(log) == 3


def test_random_test_log_shape():
    log = random_test_log(3)
    assert len(log) == 20
    lengths = [len(t.events) for t in log.traces]
    assert max(lengths) <= 15
    for t in log.traces:
        assert {e.activity for e in t.events} <= set("abcd")
        for e in t.events:
            assert set(e.attributes) <= {"x"} and 0 <= e.attributes.get("x", 0) <= 100
        gaps = [b.timestamp - a.timestamp for a, b in zip(t.events, t.events[1:])]
        assert all(0 <= g <= 2 * 3_600_000 for g in gaps)


def _xes_round_trip(log):
    buf = io.BytesIO()
    write_xes(log, buf)
    return parse_xes(buf.getvalue())


def test_xes_round_trip_generated():
    log = generate(GenSpec(2, 6, attribute_specs=ALL_KINDS, seed=9))
    assert _xes_round_trip(log) == log


def test_xes_empty_log():
    buf = io.BytesIO()
    write_xes(EventLog(()), buf)
    assert buf.getvalue().startswith(b"<?xml")
    assert parse_xes(buf.getvalue()).traces == ()


def test_all_kinds_survive():
    t = make_trace("k", [("a", 0, {"i": 1, "r": 0.1, "b": False, "s": "é\"'", "d": Timestamp(1234)})],
                   {"case_i": -7})
    back = _xes_round_trip(EventLog((t,))).traces[0]
    attrs = back.events[0].attributes
    assert attrs == t.events[0].attributes
    assert [type(attrs[k]) for k in "irbsd"] == [int, float, bool, str, Timestamp]
    assert back.case_attributes == {"case_i": -7}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 63))
def test_generated_logs_validate_and_round_trip(seed):
    log = generate(GenSpec(3, 7, attribute_specs=ALL_KINDS, seed=seed, min_events_per_trace=0,
                           inter_event_gap=(0, 5)))
    assert _xes_round_trip(log) == log


@pytest.mark.parametrize("family", sorted(MODEL_FAMILIES))
@pytest.mark.parametrize("size", [10, 50])
def test_bench_models(family, size):
    m = MODEL_FAMILIES[family](size)
    assert len(m.constraints) == size
    assert {c.template for c in m.constraints} == set(list(Template)[:min(size, len(Template))])
    assert MODEL_FAMILIES[family](size) == m
    plain = [c.activation_condition is TRUE and c.correlation_condition is TRUE and c.time_condition.unbounded
             for c in m.constraints]
    assert all(plain) if family == "cf" else not any(plain)
