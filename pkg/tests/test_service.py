"""WebSocket session service."""

import json
import os
from dataclasses import asdict

import pytest
from fastapi.testclient import TestClient

from dottrace import build_record, read_session_log, read_trace_csv
from dottrace.service import ServiceConfig, create_app


@pytest.fixture()
def client(tmp_path):
    app = create_app(ServiceConfig(data_dir=str(tmp_path), seed=42))
    with TestClient(app) as c:
        c.data_dir = str(tmp_path)
        yield c


def _create(ws, configuration="flat", orientation="vertical", pid="T01"):
    ws.send_json({"kind": "create_session", "participant_id": pid,
                  "configuration": configuration, "orientation": orientation})
    msg = ws.receive_json()
    assert msg["kind"] == "session_created"
    return msg


def _sample(ws, t, position):
    ws.send_json({"kind": "sample", "t": t, "position": list(position)})


def test_create_session_returns_model(client):
    with client.websocket_connect("/ws") as ws:
        msg = _create(ws)
        assert msg["session_id"] == "s000001"
        model = msg["model"]
        assert model["configuration"] == "flat"
        assert model["orientation"] == "vertical"
        assert len(model["dots"]) == 69
        assert model["hit_radius"] > 0


def test_fetch_model_curved(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"kind": "fetch_model", "configuration": "curved",
                      "orientation": "horizontal"})
        msg = ws.receive_json()
        assert msg["kind"] == "model"
        assert len(msg["model"]["dots"]) == 91


def test_ordered_session_end_to_end(client):
    with client.websocket_connect("/ws") as ws:
        created = _create(ws)
        sid = created["session_id"]
        dots = created["model"]["dots"]
        n = len(dots)
        for i, dot in enumerate(dots):
            _sample(ws, float(i + 1), dot)
            msg = ws.receive_json()
            assert msg == {"kind": "dot_hit", "session_id": sid,
                           "t": float(i + 1), "hits": i + 1, "total": n,
                           "dot": i}
        done = ws.receive_json()
        assert done["kind"] == "all_dots_complete"
        assert done["hits"] == n
        metrics = ws.receive_json()
        assert metrics["kind"] == "metrics"
        record = metrics["record"]
        assert record["participant_id"] == "T01"
        assert record["dot_count"] == n
        assert record["mistakes"] == 0
        assert record["tct_raw"] == float(n - 1)
        assert record["norm_tct"] * record["dot_count"] == record["tct_raw"]
        assert record["norm_mistakes"] == 0.0

        # pull the same record back on demand
        ws.send_json({"kind": "fetch_metrics", "session_id": sid})
        again = ws.receive_json()
        assert again["kind"] == "metrics"
        assert again["record"] == record

    # offline recompute from the persisted files gives the identical record
    log_path = os.path.join(client.data_dir, "logs", f"{sid}.jsonl")
    trace_path = os.path.join(client.data_dir, "traces", f"{sid}.csv")
    rebuilt = build_record(read_session_log(log_path), read_trace_csv(trace_path))
    assert asdict(rebuilt) == record


def test_out_of_order_hit_emits_mistake(client):
    with client.websocket_connect("/ws") as ws:
        created = _create(ws)
        dots = created["model"]["dots"]
        _sample(ws, 1.0, dots[1])
        first = ws.receive_json()
        second = ws.receive_json()
        assert first["kind"] == "dot_hit" and first["dot"] == 1
        assert second["kind"] == "mistake" and second["dot"] == 1
        # the skipped dot is still pending and hitting it is not a mistake
        _sample(ws, 2.0, dots[0])
        msg = ws.receive_json()
        assert msg["kind"] == "dot_hit" and msg["dot"] == 0


def test_errors_leave_connection_usable(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_text("this is not json")
        assert ws.receive_json()["kind"] == "error"

        ws.send_json({"kind": "bogus"})
        msg = ws.receive_json()
        assert msg["kind"] == "error" and "unknown message kind" in msg["message"]

        ws.send_json({"kind": "sample", "t": 1.0, "position": [0, 0, 0]})
        msg = ws.receive_json()
        assert msg["kind"] == "error" and "no active session" in msg["message"]

        ws.send_json({"kind": "create_session", "participant_id": "T01"})
        msg = ws.receive_json()
        assert msg["kind"] == "error" and "missing field" in msg["message"]

        created = _create(ws)
        dots = created["model"]["dots"]
        _sample(ws, 5.0, dots[0])
        assert ws.receive_json()["kind"] == "dot_hit"

        # non-monotonic time is rejected, session stays live
        _sample(ws, 4.0, dots[1])
        msg = ws.receive_json()
        assert msg["kind"] == "error" and "non-monotonic" in msg["message"]
        _sample(ws, 6.0, dots[1])
        assert ws.receive_json()["kind"] == "dot_hit"

        ws.send_json({"kind": "sample", "t": 7.0, "position": [0.0, 1.3]})
        msg = ws.receive_json()
        assert msg["kind"] == "error" and "position" in msg["message"]


def test_fetch_metrics_errors(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"kind": "fetch_metrics", "session_id": "s999999"})
        msg = ws.receive_json()
        assert msg["kind"] == "error" and "unknown session" in msg["message"]

        created = _create(ws)
        ws.send_json({"kind": "fetch_metrics",
                      "session_id": created["session_id"]})
        msg = ws.receive_json()
        assert msg["kind"] == "error" and "not complete" in msg["message"]


def test_sessions_get_distinct_ids(client):
    with client.websocket_connect("/ws") as ws:
        a = _create(ws)
        b = _create(ws, configuration="curved")
        assert a["session_id"] == "s000001"
        assert b["session_id"] == "s000002"
