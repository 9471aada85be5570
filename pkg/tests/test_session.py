"""Session engine: hit/mistake rules, lifecycle, log round-trips."""

import numpy as np
import pytest

from dottrace.errors import DataFormatError, SequencingError
from dottrace.geometry import Configuration, Orientation, generate_model
from dottrace.session import (BrushSample, DrawingSession, EventKind,
                              SessionLog, open_session, parse_log,
                              read_session_log, serialize_log,
                              write_session_log)


@pytest.fixture(scope="module")
def model():
    return generate_model(Configuration.FLAT, Orientation.VERTICAL)


def drive(session, indices, t0=1.0, dt=1.0):
    events = []
    for k, i in enumerate(indices):
        pos = tuple(session.model.positions[i])
        events.extend(session.feed_sample(BrushSample(t0 + k * dt, pos)))
    return events


def test_ordered_trace_completes_without_mistakes(model):
    session = open_session(model, "p1")
    events = drive(session, range(model.dot_count))
    kinds = [e.kind for e in events]
    assert kinds.count(EventKind.DOT_HIT) == model.dot_count
    assert kinds.count(EventKind.MISTAKE) == 0
    assert kinds[-1] is EventKind.ALL_DOTS_COMPLETE
    assert session.complete
    log = session.finalize()
    assert log.complete
    assert len(log.mistakes()) == 0
    assert log.events[0].kind is EventKind.SESSION_OPENED


def test_out_of_order_hit_is_a_mistake(model):
    session = open_session(model, "p1")
    events = drive(session, [1])
    assert [e.kind for e in events] == [EventKind.DOT_HIT, EventKind.MISTAKE]
    assert events[1].dot == 1
    # dot 0 is now the lowest pending dot, so hitting it is clean
    events = drive(session, [0], t0=50.0)
    assert [e.kind for e in events] == [EventKind.DOT_HIT]


def test_swapped_neighbors_yield_exactly_one_mistake(model):
    session = open_session(model, "p1")
    order = list(range(model.dot_count))
    order[10], order[11] = order[11], order[10]
    events = drive(session, order)
    mistakes = [e for e in events if e.kind is EventKind.MISTAKE]
    assert [m.dot for m in mistakes] == [11]
    assert session.complete


def test_dots_are_consumed_once(model):
    session = open_session(model, "p1")
    assert len(drive(session, [0])) == 1
    assert drive(session, [0], t0=10.0) == []   # already consumed
    assert session.hits == 1


def test_near_miss_emits_nothing(model):
    session = open_session(model, "p1")
    offset = np.array([1.5 * model.hit_radius, 0.0, 0.0])
    sample = BrushSample(1.0, tuple(model.positions[0] + offset))
    assert session.feed_sample(sample) == []


def test_time_must_increase_strictly(model):
    session = open_session(model, "p1")
    session.feed_sample(BrushSample(1.0, (0.0, 0.0, 0.0)))
    with pytest.raises(SequencingError):
        session.feed_sample(BrushSample(1.0, (0.0, 0.0, 0.0)))
    with pytest.raises(SequencingError):
        session.feed_sample(BrushSample(0.5, (0.0, 0.0, 0.0)))
    with pytest.raises(SequencingError):
        open_session(model, "x").feed_sample(BrushSample(-1.0, (0, 0, 0)))
    # the offending samples were rejected, valid input still flows
    assert session.feed_sample(BrushSample(2.0, (0.0, 0.0, 0.0))) == []


def test_samples_after_completion_are_flagged_not_scored(model):
    session = open_session(model, "p1")
    drive(session, range(model.dot_count))
    extra = session.feed_sample(
        BrushSample(1000.0, tuple(model.positions[0])))
    assert extra == []
    log = session.finalize()
    assert log.samples_after_complete == 1
    assert len(log.dot_hits()) == model.dot_count


def test_finalize_is_idempotent_and_closes_the_session(model):
    session = open_session(model, "p1")
    drive(session, [0, 1, 2])
    log1 = session.finalize()
    log2 = session.finalize()
    assert log1 is log2
    assert serialize_log(log1) == serialize_log(log2)
    with pytest.raises(SequencingError):
        session.feed_sample(BrushSample(99.0, (0, 0, 0)))


def test_incomplete_log_has_no_completion_event(model):
    session = open_session(model, "p1")
    drive(session, [0, 1])
    log = session.finalize()
    assert not log.complete
    assert all(e.kind is not EventKind.ALL_DOTS_COMPLETE for e in log.events)


def test_log_round_trip_is_bit_exact(model, tmp_path):
    rng = np.random.default_rng(12)
    session = open_session(model, "participant-7")
    t = 0.0
    for _ in range(40):
        t += float(rng.uniform(0.001, 0.7))
        pos = tuple(float(v) for v in
                    model.positions[int(rng.integers(0, model.dot_count))]
                    + rng.normal(0, 0.004, 3))
        session.feed_sample(BrushSample(t, pos))
    log = session.finalize()

    text = serialize_log(log)
    back = parse_log(text)
    assert back.participant_id == log.participant_id
    assert back.samples == log.samples            # frozen dataclasses, bit-exact
    assert back.events == log.events
    assert back.model == log.model
    assert back.complete == log.complete
    assert serialize_log(back) == text            # stable fixed point

    path = tmp_path / "session.jsonl"
    write_session_log(log, path)
    assert read_session_log(path).samples == log.samples


def test_completed_log_round_trip(model, tmp_path):
    session = open_session(model, "p2")
    drive(session, range(model.dot_count))
    log = session.finalize()
    back = parse_log(serialize_log(log))
    assert back.complete
    assert back.events == log.events
    assert back.condition == (Orientation.VERTICAL, Configuration.FLAT)


def test_parse_rejects_malformed_input():
    with pytest.raises(DataFormatError):
        parse_log("")
    with pytest.raises(DataFormatError):
        parse_log('{"record":"sample","t":1,"position":[0,0,0]}\n')
    with pytest.raises(DataFormatError):
        parse_log('not json\n')
    header = ('{"record":"header","participant_id":"x","orientation":"vertical",'
              '"configuration":"flat","model":{"dot_count":69},"complete":false,'
              '"samples_after_complete":0,"engine_version":"e/1"}')
    with pytest.raises(DataFormatError):
        parse_log(header + '\n{"record":"mystery"}\n')
    with pytest.raises(DataFormatError):
        parse_log(header + '\n{"record":"event","t":0.5,"kind":"warp"}\n')


def test_read_session_log_missing_file(tmp_path):
    with pytest.raises(DataFormatError) as err:
        read_session_log(tmp_path / "absent.jsonl")
    assert err.value.path is not None


def test_validate_rejects_inconsistent_logs(model):
    session = open_session(model, "p1")
    drive(session, range(model.dot_count))
    log = session.finalize()

    tampered = SessionLog(
        participant_id=log.participant_id, orientation=log.orientation,
        configuration=log.configuration, model=log.model,
        samples=list(log.samples), events=list(log.events), complete=False)
    with pytest.raises(DataFormatError):
        tampered.validate()   # completion event present in an "incomplete" log

    doubled = SessionLog(
        participant_id=log.participant_id, orientation=log.orientation,
        configuration=log.configuration, model=log.model,
        samples=list(log.samples),
        events=list(log.events) + [log.dot_hits()[0]], complete=True)
    with pytest.raises(DataFormatError):
        doubled.validate()    # duplicate dot index
