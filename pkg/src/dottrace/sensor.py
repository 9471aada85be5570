"""Simulated stretch-resistance sleeve over a two-link arm model.

The brush position fixes the shoulder-to-endpoint distance d; the elbow
angle follows from the two link lengths by the law of cosines, and the
sleeve resistance grows linearly with elbow flexion. Relative resistance
change against a per-trace reference (by default the trace minimum, i.e.
the most extended posture observed) is the exertion signal:

    change(%) = (R - R_m) * 100 / R_m

Negative values can only occur when the reference is supplied externally
(e.g. from a calibration window) and are dropped as outliers.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (DataFormatError, DomainError, EmptyDataError,
                     ParameterError, ReachError)

_REL_TOL = 1e-12


@dataclass(frozen=True)
class ArmModel:
    """Two-link planar reach model; lengths in meters.

    `forearm` runs from elbow to brush tip, so it includes hand and tool.
    """
    shoulder: tuple = (0.18, 1.32, 0.0)
    upper_arm: float = 0.35
    forearm: float = 0.55

    def validate(self):
        if not (math.isfinite(self.upper_arm) and self.upper_arm > 0):
            raise ParameterError(f"upper_arm must be positive, got {self.upper_arm}")
        if not (math.isfinite(self.forearm) and self.forearm > 0):
            raise ParameterError(f"forearm must be positive, got {self.forearm}")
        if len(self.shoulder) != 3 or not all(math.isfinite(c) for c in self.shoulder):
            raise ParameterError("shoulder must be a finite 3D point")

    @property
    def reach_min(self) -> float:
        return abs(self.upper_arm - self.forearm)

    @property
    def reach_max(self) -> float:
        return self.upper_arm + self.forearm


def default_arm(handedness: str = "right") -> ArmModel:
    if handedness == "right":
        return ArmModel()
    if handedness == "left":
        return ArmModel(shoulder=(-0.18, 1.32, 0.0))
    raise ParameterError(f"handedness must be 'left' or 'right', got {handedness!r}")


def _angle_from_distance(l1: float, l2: float, d: float) -> float:
    # half-angle form of the law of cosines: exact at both fold limits,
    # where the plain acos version loses sqrt(eps) precision
    a2 = max(d * d - (l1 - l2) ** 2, 0.0)
    b2 = max((l1 + l2) ** 2 - d * d, 0.0)
    return 2.0 * math.atan2(math.sqrt(a2), math.sqrt(b2))


def elbow_angle(arm: ArmModel, target) -> float:
    """Included elbow angle (radians) that places the brush at `target`.

    pi is full extension, 0 full flexion. Raises ReachError outside
    [|L1 - L2|, L1 + L2].
    """
    arm.validate()
    d = math.dist(arm.shoulder, tuple(target))
    slack = _REL_TOL * arm.reach_max
    if d > arm.reach_max + slack or d < arm.reach_min - slack:
        raise ReachError(
            f"target at distance {d:.6f} m outside reach "
            f"[{arm.reach_min:.6f}, {arm.reach_max:.6f}] m", distance=d)
    return _angle_from_distance(arm.upper_arm, arm.forearm, d)


def resistance_from_angle(theta: float, r_base: float = 100.0,
                          alpha: float = 0.05) -> float:
    """Sleeve resistance (ohms) at elbow angle theta; linear in flexion."""
    if not (math.isfinite(r_base) and r_base > 0):
        raise ParameterError(f"r_base must be positive, got {r_base}")
    if not (math.isfinite(alpha) and alpha >= 0):
        raise ParameterError(f"alpha must be >= 0, got {alpha}")
    if not (-_REL_TOL <= theta <= math.pi + _REL_TOL):
        raise DomainError(f"theta must lie in [0, pi], got {theta}")
    theta = min(math.pi, max(0.0, theta))
    return r_base * (1.0 + alpha * (math.pi - theta) / math.pi)


@dataclass(frozen=True)
class SensorSample:
    t: float
    resistance: float


@dataclass
class SensorTrace:
    samples: list = field(default_factory=list)
    r_min: float | None = None    # estimated reference, cached by estimate_rm
    meta: dict = field(default_factory=dict)

    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def resistances(self) -> np.ndarray:
        return np.array([s.resistance for s in self.samples])


def simulate_trace(arm: ArmModel, samples, r_base: float = 100.0,
                   alpha: float = 0.05, noise_sd: float = 0.1,
                   seed: int = 0, clamp_reach: bool = False) -> SensorTrace:
    """Synthesize the sleeve signal for a brush sample stream.

    With clamp_reach, out-of-reach positions are projected onto the nearest
    reachable distance instead of raising (useful for unvalidated client
    input). Identical inputs and seed give an identical trace.
    """
    arm.validate()
    if not (math.isfinite(noise_sd) and noise_sd >= 0):
        raise ParameterError(f"noise_sd must be >= 0, got {noise_sd}")
    resistance_from_angle(math.pi, r_base, alpha)  # validate sensor params once
    rng = np.random.default_rng(seed)
    out = []
    for i, s in enumerate(samples):
        if clamp_reach:
            d = math.dist(arm.shoulder, tuple(s.position))
            d = min(arm.reach_max, max(arm.reach_min, d))
            theta = _angle_from_distance(arm.upper_arm, arm.forearm, d)
        else:
            try:
                theta = elbow_angle(arm, s.position)
            except ReachError as exc:
                raise ReachError(f"sample {i}: {exc}",
                                 distance=exc.distance, sample_index=i) from exc
        r = resistance_from_angle(theta, r_base, alpha)
        if noise_sd > 0:
            r += rng.normal(0.0, noise_sd)
        out.append(SensorSample(s.t, max(r, 1e-6)))
    return SensorTrace(samples=out, meta={
        "r_base": r_base, "alpha": alpha, "noise_sd": noise_sd, "seed": seed})


def estimate_rm(trace: SensorTrace) -> float:
    """Reference resistance: the trace minimum (most extended posture)."""
    if not trace.samples:
        raise EmptyDataError("cannot estimate reference from an empty trace")
    r_min = min(s.resistance for s in trace.samples)
    if not (math.isfinite(r_min) and r_min > 0):
        raise DomainError(f"reference resistance must be positive, got {r_min}")
    trace.r_min = r_min
    return r_min


def resistance_change_series(trace: SensorTrace, r_min: float | None = None):
    """Per-sample relative change in percent; negatives dropped as outliers.

    Returns (times, changes) arrays. With the default trace-minimum
    reference every change is >= 0 by construction.
    """
    if r_min is None:
        r_min = trace.r_min if trace.r_min is not None else estimate_rm(trace)
    if not (math.isfinite(r_min) and r_min > 0):
        raise DomainError(f"reference resistance must be positive, got {r_min}")
    t = trace.times()
    change = (trace.resistances() - r_min) * 100.0 / r_min
    keep = change >= 0.0
    return t[keep], change[keep]


def mean_resistance_change(trace: SensorTrace, window=None,
                           r_min: float | None = None) -> float:
    """Mean percent resistance change over a [t0, t1] window (whole trace
    when window is None). Raises EmptyDataError when nothing survives."""
    t, change = resistance_change_series(trace, r_min=r_min)
    if window is not None:
        t0, t1 = window
        if t1 < t0:
            raise EmptyDataError(f"empty window [{t0}, {t1}]")
        keep = (t >= t0) & (t <= t1)
        change = change[keep]
    if change.size == 0:
        raise EmptyDataError("no resistance samples in window after outlier drop")
    return float(np.mean(change))


def write_trace_csv(trace: SensorTrace, path):
    """Metadata comment rows, then t,resistance at full precision."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for key in sorted(trace.meta):
            writer.writerow([f"#{key}", repr(trace.meta[key])])
        writer.writerow(["t", "resistance"])
        for s in trace.samples:
            writer.writerow([repr(float(s.t)), repr(float(s.resistance))])


def read_trace_csv(path) -> SensorTrace:
    meta = {}
    samples = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataFormatError(f"cannot read trace: {exc}", path=str(path)) from exc
    header_seen = False
    for i, row in enumerate(rows, start=1):
        if not row:
            continue
        if row[0].startswith("#"):
            key = row[0][1:]
            try:
                meta[key] = float(row[1]) if key != "seed" else int(row[1])
            except (IndexError, ValueError) as exc:
                raise DataFormatError(f"bad metadata row {i}: {row}",
                                      path=str(path)) from exc
        elif row[0] == "t":
            header_seen = True
        else:
            if not header_seen:
                raise DataFormatError("missing t,resistance header", path=str(path))
            try:
                samples.append(SensorSample(float(row[0]), float(row[1])))
            except (IndexError, ValueError) as exc:
                raise DataFormatError(f"bad trace row {i}: {row}",
                                      path=str(path)) from exc
    return SensorTrace(samples=samples, meta=meta)
