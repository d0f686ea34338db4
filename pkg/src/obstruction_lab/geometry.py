"""Planar primitives: points, directions, rays, segments, exact distances.

Angles are radians normalized to [0, 2*pi). All types are immutable value
objects; every function is pure, so instances are safe to share across
threads and results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TAU = 2.0 * math.pi

# Two points closer than this are the "same" point wherever a set
# subtraction like "all obstacles except the viewpoint" must be evaluated
# on data that went through decimal serialization.
IDENTITY_TOL = 1e-9


def _require_finite(*vals):
    for v in vals:
        if not math.isfinite(v):
            raise ValueError("coordinates must be finite, got %r" % (vals,))


@dataclass(frozen=True)
class Point:
    """A point of the plane, in length units."""

    x: float
    y: float

    def __post_init__(self):
        _require_finite(self.x, self.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


def as_xy(p) -> tuple[float, float]:
    """Coerce a Point or any 2-sequence to a plain ``(x, y)`` tuple."""
    if isinstance(p, Point):
        return (p.x, p.y)
    x, y = float(p[0]), float(p[1])
    _require_finite(x, y)
    return (x, y)


def normalize_angle(theta: float) -> float:
    """Wrap an angle into [0, 2*pi)."""
    if not math.isfinite(theta):
        raise ValueError("angle must be finite")
    t = theta % TAU
    # float mod of a tiny negative can round up to TAU itself
    return 0.0 if t >= TAU else t


@dataclass(frozen=True)
class Direction:
    """A direction of the unit circle, stored as an angle in [0, 2*pi)."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def unit(self) -> tuple[float, float]:
        """Unit vector (cos theta, sin theta); unit to within 1e-12 by construction."""
        return (math.cos(self.theta), math.sin(self.theta))

    @staticmethod
    def of_vector(vx: float, vy: float) -> "Direction":
        _require_finite(vx, vy)
        return Direction(math.atan2(vy, vx))


@dataclass(frozen=True)
class Ray:
    """The half-line {origin + t * direction : t >= 0}."""

    origin: Point
    direction: Direction


@dataclass(frozen=True)
class Segment:
    """The closed segment {origin + t * direction : t in [0, length]}."""

    origin: Point
    direction: Direction
    length: float

    def __post_init__(self):
        if not (math.isfinite(self.length) and self.length > 0.0):
            raise ValueError("segment length must be finite and positive")


def dist_point_ray(p, ray: Ray) -> float:
    """Exact distance from a point to a ray.

    Perpendicular offset when the foot parameter t = <p - origin, v> is
    nonnegative, else the distance to the ray origin. Never exceeds the
    distance to the origin.
    """
    px, py = as_xy(p)
    ox, oy = as_xy(ray.origin)
    c, s = ray.direction.unit
    dx, dy = px - ox, py - oy
    t = dx * c + dy * s
    if t <= 0.0:
        return math.hypot(dx, dy)
    return abs(c * dy - s * dx)


def dist_point_segment(p, seg: Segment) -> float:
    """Exact distance from a point to a closed segment.

    Equals the perpendicular distance when the foot lands inside [0, T],
    else the distance to the nearer endpoint (the clamped-foot formula
    computes both cases at once).
    """
    px, py = as_xy(p)
    ox, oy = as_xy(seg.origin)
    c, s = seg.direction.unit
    dx, dy = px - ox, py - oy
    t = dx * c + dy * s
    if t < 0.0:
        t = 0.0
    elif t > seg.length:
        t = seg.length
    return math.hypot(dx - t * c, dy - t * s)


# ----------------------------------------------------------------------
# array kernels, shared by the visibility layer


def ray_distances(points: np.ndarray, origin, unit) -> np.ndarray:
    """Distances of each row of ``points`` (n, 2) to one ray."""
    ox, oy = origin
    c, s = unit
    dx = points[:, 0] - ox
    dy = points[:, 1] - oy
    t = dx * c + dy * s
    np.maximum(t, 0.0, out=t)
    return np.hypot(dx - t * c, dy - t * s)


def segment_distances(points: np.ndarray, origin, unit, length: float) -> np.ndarray:
    """Distances of each row of ``points`` (n, 2) to one closed segment."""
    ox, oy = origin
    c, s = unit
    dx = points[:, 0] - ox
    dy = points[:, 1] - oy
    t = dx * c + dy * s
    np.clip(t, 0.0, length, out=t)
    return np.hypot(dx - t * c, dy - t * s)


def identity_mask(points: np.ndarray, x, tol: float = IDENTITY_TOL) -> np.ndarray:
    """Boolean mask of rows within ``tol`` of the point ``x`` (sup-norm prefilter,
    then exact Euclidean test)."""
    px, py = as_xy(x)
    near = (np.abs(points[:, 0] - px) <= tol) & (np.abs(points[:, 1] - py) <= tol)
    if near.any():
        idx = np.flatnonzero(near)
        d = np.hypot(points[idx, 0] - px, points[idx, 1] - py)
        near[idx] = d <= tol
    return near
