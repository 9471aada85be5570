"""Drawing-session state machine over brush samples.

A session consumes a time-ordered brush sample stream and emits events:
dot hits, out-of-order mistakes, and completion. Dot order is not enforced;
any pending dot can be consumed, and a mistake is logged whenever the
consumed dot is not the lowest-index pending dot at that instant. Each dot
is consumed at most once.
"""

import json
from dataclasses import dataclass, field
from enum import Enum

from .errors import DataFormatError, SequencingError
from .geometry import Configuration, DotModel, Orientation, query_hit

ENGINE_VERSION = "dottrace-engine/1"


@dataclass(frozen=True)
class BrushSample:
    t: float            # seconds from session open, strictly increasing
    position: tuple     # (x, y, z) meters


class EventKind(Enum):
    SESSION_OPENED = "session_opened"
    DOT_HIT = "dot_hit"
    MISTAKE = "mistake"
    ALL_DOTS_COMPLETE = "all_dots_complete"


@dataclass(frozen=True)
class SessionEvent:
    t: float
    kind: EventKind
    dot: int | None = None


@dataclass
class SessionLog:
    participant_id: str
    orientation: Orientation
    configuration: Configuration
    model: dict                       # model descriptor
    samples: list = field(default_factory=list)
    events: list = field(default_factory=list)
    complete: bool = False
    samples_after_complete: int = 0
    engine_version: str = ENGINE_VERSION

    @property
    def condition(self):
        return (self.orientation, self.configuration)

    def dot_hits(self) -> list:
        return [e for e in self.events if e.kind is EventKind.DOT_HIT]

    def mistakes(self) -> list:
        return [e for e in self.events if e.kind is EventKind.MISTAKE]

    def validate(self):
        if not self.events or self.events[0].kind is not EventKind.SESSION_OPENED:
            raise DataFormatError("log must start with a session_opened event")
        if self.events[0].t != 0.0:
            raise DataFormatError("session_opened must carry t = 0")
        if sum(1 for e in self.events if e.kind is EventKind.SESSION_OPENED) != 1:
            raise DataFormatError("exactly one session_opened event is allowed")
        ts = [e.t for e in self.events]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise DataFormatError("events are not time-ordered")
        sample_ts = [s.t for s in self.samples]
        if any(b <= a for a, b in zip(sample_ts, sample_ts[1:])):
            raise DataFormatError("sample timestamps are not strictly increasing")
        hits = self.dot_hits()
        indices = [e.dot for e in hits]
        if len(set(indices)) != len(indices):
            raise DataFormatError("duplicate dot_hit indices")
        n_dots = self.model["dot_count"]
        if len(hits) > n_dots:
            raise DataFormatError("more dot hits than model dots")
        n_complete = sum(1 for e in self.events if e.kind is EventKind.ALL_DOTS_COMPLETE)
        if self.complete:
            if n_complete != 1:
                raise DataFormatError("complete log must carry exactly one all_dots_complete")
            if len(hits) != n_dots:
                raise DataFormatError("complete log must hit every dot")
        elif n_complete:
            raise DataFormatError("all_dots_complete present in an incomplete log")


class DrawingSession:
    """Single-writer session handle; feed samples sequentially, then finalize."""

    def __init__(self, model: DotModel, participant_id: str):
        self.model = model
        self.participant_id = participant_id
        self._pending = set(range(model.dot_count))
        self._samples = []
        self._events = [SessionEvent(0.0, EventKind.SESSION_OPENED)]
        self._complete = False
        self._after_complete = 0
        self._log = None

    @property
    def complete(self) -> bool:
        return self._complete

    @property
    def hits(self) -> int:
        return self.model.dot_count - len(self._pending)

    def feed_sample(self, sample: BrushSample) -> list:
        """Process one brush sample; returns the events it emitted."""
        if self._log is not None:
            raise SequencingError("session already finalized")
        if self._samples and sample.t <= self._samples[-1].t:
            raise SequencingError(
                f"non-monotonic sample time {sample.t} after {self._samples[-1].t}")
        if sample.t < 0.0:
            raise SequencingError(f"sample time must be >= 0, got {sample.t}")
        self._samples.append(sample)
        if self._complete:
            # retained in the log for telemetry, excluded from metrics
            self._after_complete += 1
            return []

        hit = query_hit(self.model, sample.position)
        if hit is None or hit not in self._pending:
            return []
        emitted = [SessionEvent(sample.t, EventKind.DOT_HIT, hit)]
        if hit != min(self._pending):
            emitted.append(SessionEvent(sample.t, EventKind.MISTAKE, hit))
        self._pending.discard(hit)
        if not self._pending:
            emitted.append(SessionEvent(sample.t, EventKind.ALL_DOTS_COMPLETE))
            self._complete = True
        self._events.extend(emitted)
        return emitted

    def finalize(self) -> SessionLog:
        """Snapshot the session into an immutable log (idempotent)."""
        if self._log is None:
            self._log = SessionLog(
                participant_id=self.participant_id,
                orientation=self.model.orientation,
                configuration=self.model.configuration,
                model=self.model.descriptor(),
                samples=list(self._samples),
                events=list(self._events),
                complete=self._complete,
                samples_after_complete=self._after_complete,
            )
            self._log.validate()
        return self._log


def open_session(model: DotModel, participant_id: str) -> DrawingSession:
    return DrawingSession(model, participant_id)


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def serialize_log(log: SessionLog) -> str:
    """Line-delimited JSON: header record, then samples/events in time order.

    Events follow the sample that caused them (identical timestamp). Floats
    use shortest round-trip formatting, so parse(serialize(log)) == log
    bit-exactly.
    """
    lines = [_dumps({
        "record": "header",
        "participant_id": log.participant_id,
        "orientation": log.orientation.value,
        "configuration": log.configuration.value,
        "model": log.model,
        "complete": log.complete,
        "samples_after_complete": log.samples_after_complete,
        "engine_version": log.engine_version,
    })]
    events_by_t = {}
    for e in log.events:
        events_by_t.setdefault(e.t, []).append(e)

    def event_line(e):
        rec = {"record": "event", "t": e.t, "kind": e.kind.value}
        if e.dot is not None:
            rec["dot"] = e.dot
        return _dumps(rec)

    for e in events_by_t.pop(0.0, []):
        if e.kind is EventKind.SESSION_OPENED:
            lines.append(event_line(e))
        else:
            events_by_t.setdefault(0.0, []).append(e)
    for s in log.samples:
        lines.append(_dumps({"record": "sample", "t": s.t, "position": list(s.position)}))
        for e in events_by_t.pop(s.t, []):
            lines.append(event_line(e))
    # events not aligned to any sample (none in engine-produced logs)
    for t in sorted(events_by_t):
        for e in events_by_t[t]:
            lines.append(event_line(e))
    return "\n".join(lines) + "\n"


def parse_log(text: str) -> SessionLog:
    lines = [ln for ln in text.split("\n") if ln]
    if not lines:
        raise DataFormatError("empty session log")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"bad header line: {exc}") from exc
    if header.get("record") != "header":
        raise DataFormatError("first record must be the header")
    try:
        log = SessionLog(
            participant_id=header["participant_id"],
            orientation=Orientation(header["orientation"]),
            configuration=Configuration(header["configuration"]),
            model=header["model"],
            complete=header["complete"],
            samples_after_complete=header["samples_after_complete"],
            engine_version=header["engine_version"],
        )
    except (KeyError, ValueError) as exc:
        raise DataFormatError(f"bad header fields: {exc}") from exc
    for i, line in enumerate(lines[1:], start=2):
        try:
            rec = json.loads(line)
            if rec["record"] == "sample":
                log.samples.append(BrushSample(rec["t"], tuple(rec["position"])))
            elif rec["record"] == "event":
                log.events.append(SessionEvent(rec["t"], EventKind(rec["kind"]), rec.get("dot")))
            else:
                raise DataFormatError(f"unknown record kind on line {i}")
        except (KeyError, ValueError, TypeError) as exc:
            raise DataFormatError(f"bad record on line {i}: {exc}") from exc
    log.validate()
    return log


def write_session_log(log: SessionLog, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_log(log))


def read_session_log(path) -> SessionLog:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_log(fh.read())
    except OSError as exc:
        raise DataFormatError(f"cannot read session log: {exc}", path=str(path)) from exc
