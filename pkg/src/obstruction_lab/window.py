"""Finite disk restrictions of discrete obstacle sets.

A ``PointWindow`` is the computational stand-in for an infinite obstacle
set: the points inside a disk of known radius, plus whatever metric
metadata (separation, density radius) the generator can vouch for. Every
distance or visibility result downstream is scoped to the window; a
certificate that something is blocked survives adding obstacles outside
the window, a certificate of visibility is only horizon-qualified.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import BadParam, EmptySet
from .geometry import IDENTITY_TOL, as_xy, identity_mask, ray_distances

__all__ = ["Provenance", "PointWindow", "dist_set_ray"]


@dataclass(frozen=True)
class Provenance:
    """Where a window's points came from: generator tag, seed, parameters."""

    generator: str = "unknown"
    seed: int | None = None
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"generator": self.generator, "seed": self.seed, "params": dict(self.params)}

    @staticmethod
    def from_dict(d: dict) -> "Provenance":
        return Provenance(
            generator=str(d.get("generator", "unknown")),
            seed=d.get("seed"),
            params=dict(d.get("params", {})),
        )


class PointWindow:
    """A finite planar point set restricted to the disk of radius ``window_radius``.

    ``points`` is a read-only float64 array of shape (n, 2). Instances are
    immutable after construction; the KD-tree index is built lazily and
    cached (cheap to share across threads, queries are pure).
    """

    __slots__ = ("points", "window_radius", "declared_separation",
                 "declared_density_radius", "provenance", "_tree", "_norms")

    def __init__(self, points, window_radius, declared_separation=None,
                 declared_density_radius=None, provenance=None):
        pts = np.ascontiguousarray(np.asarray(points, dtype=float))
        if pts.size == 0:
            pts = pts.reshape(0, 2)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise BadParam("points must be an (n, 2) array")
        if not np.isfinite(pts).all():
            raise BadParam("points must be finite")
        w = float(window_radius)
        if not (w > 0.0 and np.isfinite(w)):
            raise BadParam("window_radius must be positive and finite")
        norms = np.hypot(pts[:, 0], pts[:, 1])
        if pts.shape[0] and float(norms.max()) > w + 1e-9:
            raise BadParam(
                "point with norm %.17g exceeds window radius %.17g" % (float(norms.max()), w)
            )
        if declared_separation is not None and not (float(declared_separation) > 0.0):
            raise BadParam("declared_separation must be positive")
        if declared_density_radius is not None and not (float(declared_density_radius) > 0.0):
            raise BadParam("declared_density_radius must be positive")
        pts.setflags(write=False)
        self.points = pts
        self.window_radius = w
        self.declared_separation = (
            None if declared_separation is None else float(declared_separation)
        )
        self.declared_density_radius = (
            None if declared_density_radius is None else float(declared_density_radius)
        )
        self.provenance = provenance if provenance is not None else Provenance()
        self._tree = None
        self._norms = norms

    def __len__(self) -> int:
        return self.points.shape[0]

    def __repr__(self):
        return "PointWindow(n=%d, W=%g, gen=%s)" % (
            len(self), self.window_radius, self.provenance.generator)

    @property
    def norms(self) -> np.ndarray:
        return self._norms

    @property
    def tree(self) -> cKDTree:
        if self._tree is None:
            self._tree = cKDTree(self.points)
        return self._tree

    def count_within(self, r: float) -> int:
        """Growth count: number of points with norm strictly below ``r``."""
        return int(np.count_nonzero(self._norms < r))

    def neighbor_indices(self, center, radius: float) -> np.ndarray:
        """Indices of points within ``radius`` of ``center`` (sorted)."""
        idx = self.tree.query_ball_point(as_xy(center), radius)
        return np.sort(np.asarray(idx, dtype=np.intp))

    def nearest_non_identical(self, x) -> float:
        """Distance to the nearest point that is not ``x`` itself (1e-9 identity).

        Returns ``inf`` when the exclusion empties the window.
        """
        n = len(self)
        if n == 0:
            return float("inf")
        k = min(2, n)
        d, _ = self.tree.query(as_xy(x), k=k)
        d = np.atleast_1d(d)
        for val in d:
            if val > IDENTITY_TOL:
                return float(val)
        # both nearest hits were identity-close; fall back to a full scan
        keep = ~identity_mask(self.points, x)
        if not keep.any():
            return float("inf")
        sub = self.points[keep]
        return float(np.hypot(sub[:, 0] - as_xy(x)[0], sub[:, 1] - as_xy(x)[1]).min())


def dist_set_ray(window: PointWindow, ray, exclude=None) -> float:
    """Minimum distance from the window's points to a ray.

    Points within 1e-9 of ``exclude`` are dropped first (the set-minus of a
    viewpoint that may itself be an obstacle). The result is window-scoped:
    obstacles beyond the window could only decrease it.
    """
    pts = window.points
    if exclude is not None:
        keep = ~identity_mask(pts, exclude)
        pts = pts[keep]
    if pts.shape[0] == 0:
        raise EmptySet("no obstacles left after exclusion")
    ox, oy = as_xy(ray.origin)
    return float(ray_distances(pts, (ox, oy), ray.direction.unit).min())
