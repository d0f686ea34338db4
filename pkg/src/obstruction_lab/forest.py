"""Constant cascade, tangential/frontal boundary classification, the
interval-subdivision finder, and the frontal census.

The constant cascade ties an obstacle density radius R and a clearance eps
to a tangent tolerance, a per-area circle budget, a chord depth, and the
tower-sized horizon bound T_min. T_min is astronomically large for every
nontrivial input (its base-2 logarithm is already in the thousands), so it
is carried in log2 form only; materializing it as a plain float would be a
contract violation, not an implementation choice. Experiments therefore run
at desk-scale horizons, where the classifier and the census are exact
window computations.

Boundary-point classes on the circle of radius eps around an obstacle z:

* ``not_eps_visible`` - every direction blocked;
* ``tangential_below`` / ``tangential_above`` - some free direction hugs one
  of the two tangents within the tangent tolerance (and meets the circle
  only at the point; free directions cannot re-enter the disk when z itself
  is an obstacle);
* ``frontal`` - visible, but only by rays well away from both tangents.

Below/above follows the rotation convention: rotate the plane so the point
sits rightmost on its circle; a near-tangent ray pointing downward is
"below", upward is "above".
"""

from __future__ import annotations

import math
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .arcs import ArcSet, occlusion_intervals
from .errors import BadParam, HorizonExceedsWindow, NotMultiple, SubdivisionNotFound
from .geometry import TAU, Direction, Point, Ray, as_xy
from .window import PointWindow

__all__ = [
    "ForestConstants", "forest_constants", "next_multiple",
    "BoundaryClass", "classify_boundary_point",
    "DJConstants", "dj_constants", "Subdivision", "dj_find_subdivision",
    "CensusRow", "CensusResult", "frontal_census",
]


# ----------------------------------------------------------------------
# constants

@dataclass(frozen=True)
class ForestConstants:
    eps: float
    R: float
    N: int
    tangent_delta: float
    C: float
    mu: float
    j: int
    log2_T_min: float

    def mgon_count(self, T: float) -> int:
        """Number of polygon edges used by the boundary pigeonhole at
        horizon T (reporting only)."""
        return int(math.floor(32.0 * T / self.mu))


def next_multiple(eps: float, R: float) -> float:
    """Least integer multiple of eps that is >= R (the rounding a caller
    applies before building the cascade)."""
    if not (eps > 0.0 and R > 0.0):
        raise BadParam("eps and R must be positive")
    q = int(math.ceil(R / eps - 1e-9))
    return max(q, 1) * eps


def forest_constants(eps: float, R: float) -> ForestConstants:
    """The full constant cascade for clearance ``eps`` and density radius
    ``R`` (which must be an integer multiple of eps; round up first).

    All quantities are exact closed forms: N = 2R/eps,
    tangent_delta = eps^2 / (2^7 R^2), C = 1/(4 R^2),
    mu = eps * tangent_delta^2 / 4 = eps^5 / (2^16 R^4), and
    j = ceil((33 + 10 log2 N) / (log2(4N) - log2(4N-1))). The horizon bound
    is reported as log2_T_min = log2(eps) - 1 + j log2(4N) only.
    """
    if not (eps > 0.0 and R > 0.0):
        raise BadParam("eps and R must be positive")
    q = R / eps
    qi = round(q)
    if qi < 1 or abs(q - qi) > 1e-9:
        raise NotMultiple("R must be an integer multiple of eps (R/eps = %.12g)" % q)
    N = 2 * int(qi)
    tangent_delta = eps * eps / (128.0 * R * R)
    C = 1.0 / (4.0 * R * R)
    mu = eps * tangent_delta * tangent_delta / 4.0
    j = math.ceil((33.0 + 10.0 * math.log2(N)) /
                  (math.log2(4 * N) - math.log2(4 * N - 1)))
    log2_T_min = math.log2(eps) - 1.0 + j * math.log2(4 * N)
    return ForestConstants(float(eps), float(R), N, tangent_delta, C, mu, int(j),
                           float(log2_T_min))


# ----------------------------------------------------------------------
# boundary classification

@dataclass(frozen=True)
class BoundaryClass:
    point: Point
    label: str  # not_eps_visible | tangential_below | tangential_above | frontal
    witness: Ray | None
    clearance: float | None = None  # angular distance of the witness to the tangent pair


def _free_in_interval(pieces, lo: float, width: float, target: float):
    """Closest direction to ``target`` within the free pieces intersected
    with the closed interval [lo, lo+width]; None when empty."""
    hi = lo + width
    best = None
    bestd = math.inf
    for s, e in pieces:
        for shift in (-TAU, 0.0, TAU):
            a = max(s + shift, lo)
            b = min(e + shift, hi)
            if b < a:
                continue
            c = min(max(target, a), b)
            d = abs(c - target)
            if d < bestd:
                bestd = d
                best = c
    return best


def _clearance(theta: float, t_down: float, t_up: float) -> float:
    d1 = abs(theta - t_down) % TAU
    d2 = abs(theta - t_up) % TAU
    return min(d1, TAU - d1, d2, TAU - d2)


def _max_clearance_direction(pieces, t_down: float, t_up: float, radial: float):
    """Free direction maximizing the angular distance to the tangent pair.

    The objective is piecewise linear with peaks at the radial direction and
    its antipode, so piece endpoints plus contained peaks suffice.
    """
    peaks = (radial % TAU, (radial + math.pi) % TAU)
    best = None
    bestc = -1.0
    for s, e in pieces:
        cands = [s, e]
        for p in peaks:
            if s <= p <= e:
                cands.append(p)
        for c in cands:
            cl = _clearance(c, t_down, t_up)
            if cl > bestc + 1e-15 or (abs(cl - bestc) <= 1e-15 and
                                      (best is None or c < best)):
                bestc = cl
                best = c
    return best, bestc


def _classify_against(p, pts: np.ndarray, eps: float, horizon: float,
                      radial: float, tangent_delta: float) -> BoundaryClass:
    px, py = p
    starts, widths, n_full, _ = occlusion_intervals(pts[:, 0] - px, pts[:, 1] - py,
                                                    eps, horizon)
    if n_full > 0:
        blocked = ArcSet.full_circle()
    else:
        blocked = ArcSet.from_start_width(zip(starts.tolist(), widths.tolist()))
    free = blocked.complement()
    point = Point(px, py)
    if free.is_empty:
        return BoundaryClass(point, "not_eps_visible", None)
    pieces = free.pieces()
    t_down = (radial - 0.5 * math.pi) % TAU
    t_up = (radial + 0.5 * math.pi) % TAU
    # the outward-side tolerance wedges: [t_down, t_down + delta] tilts from
    # the downward tangent toward the radial, [t_up - delta, t_up] likewise
    below = _free_in_interval(pieces, t_down, tangent_delta, t_down)
    above = _free_in_interval(pieces, t_up - tangent_delta, tangent_delta, t_up)
    if below is not None or above is not None:
        if above is None or (below is not None and
                             abs(below - t_down) <= abs(above - t_up)):
            theta, label = below, "tangential_below"
        else:
            theta, label = above, "tangential_above"
        return BoundaryClass(point, label, Ray(point, Direction(theta)),
                             _clearance(theta, t_down, t_up))
    theta, cl = _max_clearance_direction(pieces, t_down, t_up, radial)
    return BoundaryClass(point, "frontal", Ray(point, Direction(theta)), cl)


def classify_boundary_point(z, angle: float, window: PointWindow,
                            fc: ForestConstants, horizon: float) -> BoundaryClass:
    """Classify the point at the given angle on the circle of radius
    fc.eps around ``z`` against the window's obstacles.

    ``z`` itself is normally one of the obstacles (the census always calls
    it that way); then any free direction automatically meets the circle
    only at the classified point. The horizon-margin precondition applies as
    in the visibility layer.
    """
    zx, zy = as_xy(z)
    eps = fc.eps
    radial = angle % TAU
    p = (zx + eps * math.cos(radial), zy + eps * math.sin(radial))
    if not math.isinf(horizon):
        if math.hypot(*p) + horizon + eps > window.window_radius + 1e-9:
            raise HorizonExceedsWindow("boundary point too close to the window edge")
    return _classify_against(p, window.points, eps, horizon, radial,
                             fc.tangent_delta)


# ----------------------------------------------------------------------
# interval subdivision (pigeonhole on scales)

@dataclass(frozen=True)
class DJConstants:
    r: float
    j: int
    Z0: float


def dj_constants(k: int, c: float, eta: float) -> DJConstants:
    """Scale ratio r = k/(k-1), ladder height j = ceil(log(2/(c eta))/log r)
    (base 2; the quotient is base-free), and threshold Z0 = 2 eta k^j.

    When c*eta >= 2 the raw j is nonpositive and is clamped to 1.
    """
    if k < 2 or not (c > 0.0) or not (eta > 0.0):
        raise BadParam("need k >= 2, c > 0, eta > 0")
    r = k / (k - 1.0)
    arg = 2.0 / (c * eta)
    j = 1 if arg <= 1.0 else max(1, math.ceil(math.log2(arg) / math.log2(r)))
    return DJConstants(r, int(j), 2.0 * eta * float(k) ** j)


@dataclass(frozen=True)
class Subdivision:
    J: tuple
    x: float
    hits: tuple


def dj_find_subdivision(A, interval, k: int, eta: float) -> Subdivision:
    """Find a sub-interval J of length k*x, x >= 2*eta, whose k equal
    sub-intervals each contain an element of A.

    A must be sorted with gaps >= eta and hold at least c*|I| elements for
    the caller's density c; existence is then guaranteed once
    |I| >= Z0(k, c, eta). The search is deterministic: scales follow the
    ladder x_t = 2*eta*r^t for t = 0..j and, per scale, anchors slide over
    the critical positions a - i*x (a in A). Raises SubdivisionNotFound with
    the tried ladder when nothing fits, which signals a violated
    precondition.
    """
    A = [float(a) for a in A]
    if not A:
        raise BadParam("A must be nonempty")
    if any(b < a for a, b in zip(A, A[1:])):
        raise BadParam("A must be sorted")
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        raise BadParam("interval must have positive length")
    if k < 2:
        raise BadParam("k must be >= 2")
    c = len(A) / (hi - lo)
    cons = dj_constants(k, c, eta)
    ladder = [2.0 * eta * cons.r ** t for t in range(cons.j + 1)]
    tol = 1e-9
    for x in ladder:
        length = k * x
        if length > hi - lo + tol:
            continue
        anchors = sorted({a - i * x for a in A for i in range(k)} | {lo})
        for s in anchors:
            if s < lo - tol or s + length > hi + tol:
                continue
            hits = []
            for i in range(k):
                left = s + i * x
                right = left + x
                pos = bisect_left(A, left - tol)
                if pos < len(A) and A[pos] < right:
                    hits.append(A[pos])
                else:
                    break
            if len(hits) == k:
                return Subdivision((s, s + length), x, tuple(hits))
    raise SubdivisionNotFound("no subdivision at any ladder scale", ladder)


# ----------------------------------------------------------------------
# frontal census

@dataclass(frozen=True)
class CensusRow:
    z: tuple
    frontal: int
    tangential: int
    hidden: int


@dataclass(frozen=True)
class CensusResult:
    total: int
    frontal: int
    tangential_only: int
    hidden_witnesses: tuple
    rows: tuple


def frontal_census(window: PointWindow, fc: ForestConstants, T: float,
                   samples_per_circle: int = 256, threads: int = 1,
                   max_circles: int = None) -> CensusResult:
    """Sample the boundary circle of every window point inside radius T and
    classify each sampled point at horizon T.

    A circle is tagged frontal when any sample is frontal, tangential-only
    when every sample is tangential; sampled points that are not visible at
    all are collected as hidden witnesses. Sampling makes the frontal count
    a lower bound and the hidden list an upper-bound style census; raising
    ``samples_per_circle`` tightens both. Circles are scanned sorted by
    coordinates (capped by ``max_circles``), and the thread count never
    changes the output.
    """
    if samples_per_circle < 1:
        raise BadParam("samples_per_circle must be >= 1")
    eps = fc.eps
    centers = window.points[window.norms <= T]
    order = np.lexsort((centers[:, 1], centers[:, 0]))
    centers = centers[order]
    if max_circles is not None:
        centers = centers[:max_circles]
    for z in centers:
        if math.hypot(z[0], z[1]) + 2.0 * eps + T > window.window_radius + 1e-9:
            raise HorizonExceedsWindow(
                "circle at (%.6g, %.6g) has no horizon-%g margin" % (z[0], z[1], T))
    angles = (TAU / samples_per_circle) * np.arange(samples_per_circle)

    def census_one(z):
        zx, zy = float(z[0]), float(z[1])
        idx = window.neighbor_indices((zx, zy), T + 2.0 * eps + 1e-9)
        pts = window.points[idx]
        n_frontal = n_tangential = n_hidden = 0
        hidden_pts = []
        for a in angles:
            p = (zx + eps * math.cos(a), zy + eps * math.sin(a))
            bc = _classify_against(p, pts, eps, T, float(a), fc.tangent_delta)
            if bc.label == "frontal":
                n_frontal += 1
            elif bc.label == "not_eps_visible":
                n_hidden += 1
                hidden_pts.append(p)
            else:
                n_tangential += 1
        return CensusRow((zx, zy), n_frontal, n_tangential, n_hidden), hidden_pts

    window.tree  # build once before any pool workers share it
    results = []
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(census_one, centers))
    else:
        results = [census_one(z) for z in centers]

    rows = tuple(r for r, _ in results)
    witnesses = tuple(p for _, h in results for p in h)
    frontal = sum(1 for r in rows if r.frontal > 0)
    tang_only = sum(1 for r in rows if r.frontal == 0 and r.hidden == 0)
    return CensusResult(len(rows), frontal, tang_only, witnesses, rows)
