"""WebSocket session service for remote tracing clients.

One socket connection drives one live drawing session at a time. The
client streams brush samples; the service echoes engine events as they
happen and, on completion, synthesizes the sleeve trace for the recorded
samples, persists the session, and pushes the metrics record.

Messages are JSON objects with a "kind" field:

  client -> server: create_session, sample, fetch_metrics, fetch_model
  server -> client: session_created, dot_hit, mistake, all_dots_complete,
                    metrics, model, error

A malformed or out-of-sequence message yields an error reply; the
connection and any active session survive it.
"""

import json
import math
import os
from dataclasses import asdict, dataclass, field

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .errors import DotTraceError
from .geometry import (Configuration, ModelParams, Orientation,
                       generate_model)
from .metrics import build_record
from .sensor import ArmModel, default_arm, simulate_trace, write_trace_csv
from .session import BrushSample, DrawingSession, EventKind, write_session_log

_EVENT_MESSAGE = {
    EventKind.DOT_HIT: "dot_hit",
    EventKind.MISTAKE: "mistake",
    EventKind.ALL_DOTS_COMPLETE: "all_dots_complete",
}


@dataclass
class ServiceConfig:
    data_dir: str | None = None    # persist logs/traces here when set
    model_params: ModelParams = field(default_factory=ModelParams)
    arm: ArmModel = field(default_factory=default_arm)
    r_base: float = 100.0
    alpha: float = 0.05
    noise_sd: float = 0.1
    seed: int = 0


class _SessionRuntime:
    def __init__(self, session_id: str, session: DrawingSession, index: int):
        self.session_id = session_id
        self.session = session
        self.index = index
        self.record = None


class SessionService:
    """Connection-independent engine state shared by all sockets."""

    def __init__(self, config: ServiceConfig | None = None):
        self.config = config or ServiceConfig()
        self._models = {}
        self._sessions = {}
        self._counter = 0
        if self.config.data_dir:
            os.makedirs(os.path.join(self.config.data_dir, "logs"), exist_ok=True)
            os.makedirs(os.path.join(self.config.data_dir, "traces"), exist_ok=True)

    def model(self, configuration: Configuration, orientation: Orientation):
        key = (configuration, orientation)
        if key not in self._models:
            self._models[key] = generate_model(
                configuration, orientation, self.config.model_params)
        return self._models[key]

    def create_session(self, participant_id: str,
                       configuration: Configuration,
                       orientation: Orientation) -> _SessionRuntime:
        model = self.model(configuration, orientation)
        self._counter += 1
        runtime = _SessionRuntime(
            session_id=f"s{self._counter:06d}",
            session=DrawingSession(model, participant_id),
            index=self._counter)
        self._sessions[runtime.session_id] = runtime
        return runtime

    def get(self, session_id: str) -> _SessionRuntime | None:
        return self._sessions.get(session_id)

    def complete_session(self, runtime: _SessionRuntime) -> dict:
        """Finalize, synthesize the sensor trace, persist, return the record."""
        log = runtime.session.finalize()
        trace = simulate_trace(
            self.config.arm, log.samples, r_base=self.config.r_base,
            alpha=self.config.alpha, noise_sd=self.config.noise_sd,
            seed=self.config.seed + runtime.index, clamp_reach=True)
        runtime.record = build_record(log, trace)
        if self.config.data_dir:
            write_session_log(log, os.path.join(
                self.config.data_dir, "logs", f"{runtime.session_id}.jsonl"))
            write_trace_csv(trace, os.path.join(
                self.config.data_dir, "traces", f"{runtime.session_id}.csv"))
        return asdict(runtime.record)


def _parse_position(value):
    if (not isinstance(value, (list, tuple)) or len(value) != 3
            or not all(isinstance(c, (int, float)) and math.isfinite(c)
                       for c in value)):
        raise ValueError(f"position must be three finite numbers, got {value!r}")
    return tuple(float(c) for c in value)


def _parse_time(value):
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ValueError(f"t must be a finite number, got {value!r}")
    return float(value)


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    app = FastAPI(title="dottrace session service")
    service = SessionService(config)
    app.state.service = service

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        active = None

        async def send(payload: dict):
            await ws.send_text(json.dumps(payload, separators=(",", ":")))

        async def fail(message: str):
            await send({"kind": "error", "message": message})

        while True:
            try:
                raw = await ws.receive_text()
            except WebSocketDisconnect:
                return
            try:
                msg = json.loads(raw)
                if not isinstance(msg, dict):
                    raise ValueError("message must be a JSON object")
            except ValueError as exc:
                await fail(f"malformed message: {exc}")
                continue
            kind = msg.get("kind")
            try:
                if kind == "create_session":
                    participant = msg["participant_id"]
                    if not isinstance(participant, str) or not participant:
                        raise ValueError("participant_id must be a non-empty string")
                    configuration = Configuration(msg["configuration"])
                    orientation = Orientation(msg["orientation"])
                    active = service.create_session(
                        participant, configuration, orientation)
                    await send({"kind": "session_created",
                                "session_id": active.session_id,
                                "model": active.session.model.payload()})
                elif kind == "sample":
                    if active is None:
                        raise ValueError("no active session; send create_session first")
                    sample = BrushSample(t=_parse_time(msg["t"]),
                                         position=_parse_position(msg["position"]))
                    events = active.session.feed_sample(sample)
                    total = active.session.model.dot_count
                    for event in events:
                        payload = {"kind": _EVENT_MESSAGE[event.kind],
                                   "session_id": active.session_id,
                                   "t": event.t,
                                   "hits": active.session.hits,
                                   "total": total}
                        if event.dot is not None:
                            payload["dot"] = event.dot
                        await send(payload)
                    if active.session.complete and active.record is None:
                        record = service.complete_session(active)
                        await send({"kind": "metrics",
                                    "session_id": active.session_id,
                                    "record": record})
                elif kind == "fetch_metrics":
                    runtime = service.get(msg["session_id"])
                    if runtime is None:
                        raise ValueError(f"unknown session {msg.get('session_id')!r}")
                    if runtime.record is None:
                        raise ValueError("session is not complete yet")
                    await send({"kind": "metrics",
                                "session_id": runtime.session_id,
                                "record": asdict(runtime.record)})
                elif kind == "fetch_model":
                    configuration = Configuration(msg["configuration"])
                    orientation = Orientation(msg["orientation"])
                    await send({"kind": "model",
                                "model": service.model(configuration,
                                                       orientation).payload()})
                else:
                    raise ValueError(f"unknown message kind {kind!r}")
            except (KeyError, TypeError, ValueError, DotTraceError) as exc:
                if isinstance(exc, KeyError):
                    await fail(f"missing field {exc}")
                else:
                    await fail(str(exc))

    return app


def serve(config: ServiceConfig | None = None, host: str = "127.0.0.1",
          port: int = 8765, frontend_dir: str | None = None):
    """Run the service with uvicorn; blocks until interrupted."""
    import uvicorn

    app = create_app(config)
    if frontend_dir:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=frontend_dir, html=True),
                  name="frontend")
    uvicorn.run(app, host=host, port=port, log_level="info")
