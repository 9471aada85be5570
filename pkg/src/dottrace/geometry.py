"""Dot-outline drawing models for the four study conditions.

The outline is a procedural closed fish shape: an ellipse body joined to a
triangular tail lobe, resampled by arc length to a fixed number of dots
(69 flat, 91 curved). Curved models displace the dots along the depth axis
with one sine period over the outline; orientation is applied last as a
rigid transform.

World frame: x right, y up, z away from the user, meters.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ParameterError


class Configuration(Enum):
    FLAT = "flat"
    CURVED = "curved"


class Orientation(Enum):
    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"


#: Dot counts are fixed per configuration for every parameter set.
DOT_COUNTS = {Configuration.FLAT: 69, Configuration.CURVED: 91}

_DENSE_ARC_STEPS = 8192
_DENSE_EDGE_STEPS = 512


@dataclass(frozen=True)
class Dot:
    index: int
    position: tuple  # (x, y, z) meters


@dataclass(frozen=True)
class ModelParams:
    """Geometry knobs. Defaults are tuned so that every generated model

    satisfies the spacing/hit-radius invariants and stays reachable by the
    default simulated arm.
    """

    body_length: float = 0.50      # full ellipse length, m
    body_height: float = 0.32      # full ellipse height, m
    tail_length: float = 0.14      # apex distance beyond the ellipse, m
    notch_angle: float = 0.9       # half-angle of the tail notch, rad
    depth_amplitude: float = 0.10  # curved-config sine amplitude, m
    hit_radius: float = 0.006      # brush-to-dot collision radius, m
    vertical_center: tuple = (0.0, 1.30, 0.42)
    horizontal_center: tuple = (0.0, 1.08, 0.40)

    def validate(self):
        for name in ("body_length", "body_height", "tail_length", "depth_amplitude", "hit_radius"):
            if getattr(self, name) <= 0.0:
                raise ParameterError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 < self.notch_angle < np.pi / 2:
            raise ParameterError(f"notch_angle must lie in (0, pi/2), got {self.notch_angle}")


@dataclass
class DotModel:
    configuration: Configuration
    orientation: Orientation
    positions: np.ndarray  # (N, 3) float64, world frame
    hit_radius: float
    params: ModelParams = field(default_factory=ModelParams)

    @property
    def dot_count(self) -> int:
        return len(self.positions)

    @property
    def dots(self) -> list:
        return [Dot(i, tuple(p)) for i, p in enumerate(self.positions)]

    def descriptor(self) -> dict:
        return {
            "configuration": self.configuration.value,
            "orientation": self.orientation.value,
            "dot_count": self.dot_count,
            "hit_radius": self.hit_radius,
        }

    def payload(self) -> dict:
        """Wire representation served to clients: dot list plus hit radius."""
        return {
            "configuration": self.configuration.value,
            "orientation": self.orientation.value,
            "hit_radius": self.hit_radius,
            "dots": [[float(c) for c in p] for p in self.positions],
        }


def _dense_outline(params: ModelParams) -> np.ndarray:
    """Closed 2D outline polyline: ellipse arc around the nose + two tail edges."""
    a = 0.5 * params.body_length
    b = 0.5 * params.body_height
    beta = params.notch_angle
    theta = np.linspace(np.pi - beta, -(np.pi - beta), _DENSE_ARC_STEPS)
    arc = np.column_stack([a * np.cos(theta), b * np.sin(theta)])
    upper_junction, lower_junction = arc[0], arc[-1]
    apex = np.array([-(a + params.tail_length), 0.0])
    to_apex = np.linspace(lower_junction, apex, _DENSE_EDGE_STEPS)[1:]
    to_junction = np.linspace(apex, upper_junction, _DENSE_EDGE_STEPS)[1:-1]
    return np.vstack([arc, to_apex, to_junction])


def _resample_closed(points: np.ndarray, n: int):
    """Resample a closed polyline to n points at uniform arc-length steps."""
    closed = np.vstack([points, points[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    perimeter = cum[-1]
    s = np.arange(n) * perimeter / n
    x = np.interp(s, cum, closed[:, 0])
    y = np.interp(s, cum, closed[:, 1])
    return np.column_stack([x, y]), s / perimeter


def canonical_dots(configuration: Configuration, params: ModelParams) -> np.ndarray:
    """Dot positions in the canonical vertical frame (x-y plane, bbox-centered)."""
    n = DOT_COUNTS[configuration]
    flat, s = _resample_closed(_dense_outline(params), n)
    mid = 0.5 * (flat.min(axis=0) + flat.max(axis=0))
    flat = flat - mid
    if configuration is Configuration.CURVED:
        z = params.depth_amplitude * np.sin(2.0 * np.pi * s)
    else:
        z = np.zeros(n)
    return np.column_stack([flat, z])


def transform_orientation(positions: np.ndarray, orientation: Orientation,
                          params: ModelParams = None) -> np.ndarray:
    """Place canonical-frame dots for the requested orientation.

    Vertical keeps the x-y plane and translates to the vertical center.
    Horizontal rotates -90 degrees about the x-axis, mapping +y to +z
    (the model lies face-up), then translates to the horizontal center.
    Both are rigid transforms.
    """
    params = params or ModelParams()
    pts = np.asarray(positions, dtype=float)
    if orientation is Orientation.VERTICAL:
        return pts + np.asarray(params.vertical_center)
    rotated = np.column_stack([pts[:, 0], -pts[:, 2], pts[:, 1]])
    return rotated + np.asarray(params.horizontal_center)


def generate_model(configuration: Configuration, orientation: Orientation,
                   params: ModelParams = None) -> DotModel:
    """Build the dot model for one (configuration, orientation) condition."""
    params = params or ModelParams()
    params.validate()
    canonical = canonical_dots(configuration, params)
    positions = transform_orientation(canonical, orientation, params)
    if not np.all(np.isfinite(positions)):
        raise ParameterError("model produced non-finite dot positions")

    seg = np.linalg.norm(np.diff(np.vstack([positions, positions[:1]]), axis=0), axis=1)
    min_consecutive = seg[:-1].min()
    if params.hit_radius >= 0.5 * min_consecutive:
        raise ParameterError(
            f"hit_radius {params.hit_radius} too large: must be below half the "
            f"minimum dot spacing ({0.5 * min_consecutive:.4f} m)")
    return DotModel(configuration, orientation, positions, params.hit_radius, params)


def query_hit(model: DotModel, brush_position) -> int | None:
    """Index of the unique dot within hit_radius of the brush, or None.

    Uniqueness follows from the hit-radius invariant: no brush point can sit
    within the radius of two dots at once.
    """
    deltas = model.positions - np.asarray(brush_position, dtype=float)
    dist = np.einsum("ij,ij->i", deltas, deltas)
    idx = int(np.argmin(dist))
    if dist[idx] <= model.hit_radius * model.hit_radius:
        return idx
    return None


def write_model_csv(model: DotModel, path):
    """Export: header record (configuration, orientation, hit_radius), then
    one record per dot with coordinates at 6 decimal places."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("configuration,orientation,hit_radius\n")
        fh.write(f"{model.configuration.value},{model.orientation.value},{model.hit_radius:.6f}\n")
        fh.write("index,x,y,z\n")
        for i, (x, y, z) in enumerate(model.positions):
            fh.write(f"{i},{x:.6f},{y:.6f},{z:.6f}\n")
