"""Visibility analysis at a point: free/blocked arcs, horizon certificates,
hidden-point search, and the inverse-distance measure bound.

Semantics of a report: "blocked" is the open condition (some obstacle comes
strictly within eps of the ray or segment), "free" its complement. A
certificate of blockedness is valid for any superset of the window, because
extra obstacles only block more. A finite-horizon certificate additionally
demands that the window contain everything that could possibly reach the
segment (``|x| + T + eps <= W``); under that margin, "hidden at horizon T"
is a true statement about the underlying infinite set, not just the window.
Free arcs at infinite horizon are window-scoped only and are labeled so.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .arcs import ArcSet, coverage_is_full, occlusion_intervals
from .errors import BadParam, EpsilonTooLarge, HorizonExceedsWindow, NoAdmissibleRegion
from .geometry import IDENTITY_TOL, as_xy
from .window import PointWindow

__all__ = [
    "VisibilityReport", "visibility_arcs",
    "Certificate", "t_blocked_certificate",
    "hidden_search", "SumAndBound", "inverse_norm_sum_and_bound",
]


@dataclass(frozen=True)
class VisibilityReport:
    query_point: tuple
    eps: float
    horizon: float
    free: ArcSet
    blocked: ArcSet
    contributing_obstacles: int

    @property
    def hidden(self) -> bool:
        """Every direction blocked at this horizon (window-scoped for
        infinite horizon)."""
        return self.free.is_empty

    def arc_rows(self):
        """CSV-ready rows: (start, end, kind)."""
        rows = [(s, e, "blocked") for s, e in self.blocked.arcs]
        rows += [(s, e, "free") for s, e in self.free.arcs]
        return rows


def _check_margin(x, window: PointWindow, eps: float, horizon: float):
    if math.isinf(horizon):
        return
    xx, xy = as_xy(x)
    if math.hypot(xx, xy) + horizon + eps > window.window_radius + 1e-9:
        raise HorizonExceedsWindow(
            "need |x| + T + eps <= window radius (%.6g + %.6g + %.6g > %.6g)"
            % (math.hypot(xx, xy), horizon, eps, window.window_radius)
        )


def _occlusion_of(x, pts: np.ndarray, eps: float, horizon: float):
    xx, xy = as_xy(x)
    dx = pts[:, 0] - xx
    dy = pts[:, 1] - xy
    return occlusion_intervals(dx, dy, eps, horizon)


def visibility_arcs(x, window: PointWindow, eps: float,
                    horizon: float = math.inf) -> VisibilityReport:
    """Exact free/blocked arcs at ``x`` against the window's obstacles.

    The viewpoint itself is not an obstacle: window points within 1e-9 of
    ``x`` are excluded. With a finite horizon the window-margin precondition
    must hold so the answer is horizon-exact, not merely window-scoped.
    """
    if not (eps > 0.0):
        raise BadParam("eps must be positive")
    _check_margin(x, window, eps, horizon)
    starts, widths, n_full, contributing = _occlusion_of(x, window.points, eps, horizon)
    if n_full > 0:
        blocked = ArcSet.full_circle()
    else:
        blocked = ArcSet.from_start_width(zip(starts.tolist(), widths.tolist()))
    free = blocked.complement()
    return VisibilityReport(as_xy(x), float(eps), float(horizon), free, blocked,
                            contributing)


@dataclass(frozen=True)
class Certificate:
    certified_hidden: bool
    uncovered: ArcSet


def _hidden_kernel(x, window: PointWindow, eps: float, T: float) -> bool:
    """Coverage decision only (no ArcSet construction), with cheap
    short-circuits. Exact: comparisons decide, never residual thresholds."""
    d = window.nearest_non_identical(x)
    if d < eps:
        return True
    idx = window.neighbor_indices(x, T + eps)
    pts = window.points[idx]
    starts, widths, n_full, _ = _occlusion_of(x, pts, eps, T)
    if n_full > 0:
        return True
    return coverage_is_full(starts, widths)


def t_blocked_certificate(x, window: PointWindow, eps: float, T: float) -> Certificate:
    """Decide whether every length-``T`` segment from ``x`` meets the
    eps-neighborhood of the obstacle set.

    Requires ``|x| + T + eps <= window_radius`` so that obstacles outside the
    window provably cannot matter; a True answer then holds for any
    extension of the window. When False, ``uncovered`` is the exact set of
    directions whose segment stays eps-clear of every window obstacle.
    """
    if not (eps > 0.0 and T > 0.0 and math.isfinite(T)):
        raise BadParam("need eps > 0 and finite T > 0")
    _check_margin(x, window, eps, T)
    if _hidden_kernel(x, window, eps, T):
        return Certificate(True, ArcSet.empty())
    report = visibility_arcs(x, window, eps, T)
    return Certificate(False, report.free)


def _grid_candidates(admissible: float, spacing: float) -> np.ndarray:
    n = int(math.floor(admissible / spacing))
    ax = np.arange(-n, n + 1, dtype=float) * spacing
    xs, ys = np.meshgrid(ax, ax, indexing="ij")
    cand = np.column_stack([xs.ravel(), ys.ravel()])
    keep = np.hypot(cand[:, 0], cand[:, 1]) <= admissible
    cand = cand[keep]
    order = np.lexsort((cand[:, 1], cand[:, 0]))
    return cand[order]


def _circle_candidates(window: PointWindow, eps: float, admissible: float,
                       samples_per_circle: int) -> np.ndarray:
    centers = window.points[window.norms <= admissible - eps]
    order = np.lexsort((centers[:, 1], centers[:, 0]))
    centers = centers[order]
    ang = (2.0 * math.pi / samples_per_circle) * np.arange(samples_per_circle)
    ring = np.column_stack([eps * np.cos(ang), eps * np.sin(ang)])
    if centers.shape[0] == 0:
        return np.empty((0, 2))
    return (centers[:, None, :] + ring[None, :, :]).reshape(-1, 2)


def hidden_search(window: PointWindow, eps: float, T: float,
                  candidates: str = "grid", spacing: float = None,
                  samples_per_circle: int = 256, max_results: int = None,
                  threads: int = 1):
    """Scan candidate viewpoints and return those certified hidden at
    horizon ``T``.

    ``candidates="grid"`` scans a square grid of the given spacing over the
    admissible disk (where the window margin holds); ``"boundary_circles"``
    scans equally spaced points on the radius-eps circle around each
    admissible window point. Output is deterministic: candidates are
    visited sorted by coordinates and the result order follows the scan;
    ``max_results`` truncates the scan after that many witnesses. Thread
    count never changes the result.
    """
    admissible = window.window_radius - T - eps
    if admissible < 0.0:
        raise NoAdmissibleRegion(
            "window radius %.6g cannot host T=%.6g, eps=%.6g" %
            (window.window_radius, T, eps))
    if candidates == "grid":
        if spacing is None or not (spacing > 0.0):
            raise BadParam("grid mode needs a positive spacing")
        cand = _grid_candidates(admissible, spacing)
    elif candidates == "boundary_circles":
        if samples_per_circle < 1:
            raise BadParam("samples_per_circle must be >= 1")
        cand = _circle_candidates(window, eps, admissible, samples_per_circle)
    else:
        raise BadParam("unknown candidate mode %r" % candidates)

    def scan_chunk(chunk):
        return [_hidden_kernel((cx, cy), window, eps, T) for cx, cy in chunk]

    found = []
    chunk_size = 64
    chunks = [cand[i:i + chunk_size] for i in range(0, len(cand), chunk_size)]
    if threads > 1:
        pool = ThreadPoolExecutor(max_workers=threads)
    else:
        pool = None
    try:
        window.tree  # build the index once, outside the pool
        i = 0
        while i < len(chunks):
            batch = chunks[i:i + (threads if threads > 1 else 1) * 4]
            if pool is not None:
                flag_lists = list(pool.map(scan_chunk, batch))
            else:
                flag_lists = [scan_chunk(c) for c in batch]
            for chunk, flags in zip(batch, flag_lists):
                for (cx, cy), hid in zip(chunk, flags):
                    if hid:
                        found.append((float(cx), float(cy)))
                        if max_results is not None and len(found) >= max_results:
                            return found
            i += len(batch)
    finally:
        if pool is not None:
            pool.shutdown(wait=False)
    return found


@dataclass(frozen=True)
class SumAndBound:
    partial_sum: float
    blocked_measure: float
    bound: float


def inverse_norm_sum_and_bound(window: PointWindow, x, eps: float) -> SumAndBound:
    """Window partial sum of 1/|y - x|, the blocked measure at infinite
    horizon, and the bound pi * eps * sum that must dominate it.

    Precondition: eps is strictly below the distance from ``x`` to every
    obstacle (after the identity exclusion), else EpsilonTooLarge.
    """
    if not (eps > 0.0):
        raise BadParam("eps must be positive")
    xx, xy = as_xy(x)
    d = np.hypot(window.points[:, 0] - xx, window.points[:, 1] - xy)
    d = d[d > IDENTITY_TOL]
    if d.size == 0:
        raise BadParam("window is empty after excluding the viewpoint")
    dmin = float(d.min())
    if eps >= dmin:
        raise EpsilonTooLarge("eps=%.6g is not below the minimum obstacle distance %.6g"
                              % (eps, dmin))
    partial = float(np.sum(1.0 / d))
    blocked = visibility_arcs(x, window, eps, math.inf).blocked.measure
    return SumAndBound(partial, blocked, math.pi * eps * partial)
