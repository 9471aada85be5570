"""Normalized metrics: identities, windowing, error paths, CSV round-trip."""

import numpy as np
import pytest

from dottrace.cohort import SimPolicy, simulate_session
from dottrace.errors import (DataFormatError, IncompleteSessionError,
                             TraceAlignmentError)
from dottrace.geometry import Configuration, Orientation, generate_model
from dottrace.metrics import (build_record, compute_mistakes,
                              compute_resistance_metric, compute_tct,
                              read_metrics_csv, write_metrics_csv)
from dottrace.sensor import SensorSample, SensorTrace, default_arm
from dottrace.session import BrushSample, open_session


@pytest.fixture(scope="module")
def simulated():
    model = generate_model(Configuration.FLAT, Orientation.VERTICAL)
    policy = SimPolicy(speed=2.0, dwell=0.1, out_of_order_prob=0.2, seed=5)
    rng = np.random.default_rng(5)
    log, trace, swaps = simulate_session(
        model, "p9", policy, rng, default_arm(), 100.0, 0.05, 0.1)
    return log, trace, swaps


def test_metric_identities(simulated):
    log, trace, _ = simulated
    rec = build_record(log, trace)
    assert abs(rec.norm_tct * rec.dot_count - rec.tct_raw) <= 1e-12
    assert abs(rec.norm_mistakes * rec.tct_raw - rec.mistakes) <= 1e-12
    assert abs(rec.norm_resistance * rec.tct_raw
               - rec.mean_resistance_pct) <= 1e-12
    assert rec.tct_raw > 0
    assert rec.dot_count == 69


def test_window_runs_first_to_last_hit(simulated):
    log, _, _ = simulated
    hits = sorted(e.t for e in log.dot_hits())
    tct, norm = compute_tct(log)
    assert tct == hits[-1] - hits[0]
    assert norm == tct / 69


def test_mistakes_match_planned_swaps(simulated):
    log, _, swaps = simulated
    n, norm = compute_mistakes(log)
    assert n == swaps
    assert norm == n / compute_tct(log)[0]


def test_incomplete_session_is_rejected():
    model = generate_model(Configuration.FLAT, Orientation.VERTICAL)
    session = open_session(model, "px")
    session.feed_sample(BrushSample(1.0, tuple(model.positions[0])))
    log = session.finalize()
    with pytest.raises(IncompleteSessionError):
        compute_tct(log)
    with pytest.raises(IncompleteSessionError):
        build_record(log, SensorTrace(samples=[SensorSample(1.0, 100.0)]))


def test_trace_must_overlap_hit_window(simulated):
    log, _, _ = simulated
    offside = SensorTrace(samples=[SensorSample(1e6, 100.0)])
    with pytest.raises(TraceAlignmentError):
        compute_resistance_metric(log, offside)


def test_metrics_csv_round_trip(tmp_path, simulated):
    log, trace, _ = simulated
    rec = build_record(log, trace)
    path = tmp_path / "metrics.csv"
    write_metrics_csv([rec, rec], path)
    back = read_metrics_csv(path)
    assert back == [rec, rec]                    # repr floats, bit-exact
    with pytest.raises(DataFormatError):
        read_metrics_csv(tmp_path / "missing.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("nope\n")
    with pytest.raises(DataFormatError):
        read_metrics_csv(bad)
