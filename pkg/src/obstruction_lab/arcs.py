"""Unions of circular arcs on the direction circle, and occlusion arcs.

``ArcSet`` is the universal currency for blocked / free direction sets: a
canonical union of disjoint half-open arcs ``[start, end)`` with at most one
arc wrapping through ``2*pi -> 0``. ``blocked_arc`` gives the exact closed
form for the set of directions in which a single point obstacle comes within
``eps`` of a ray or a length-``T`` segment.

Full-circle coverage decisions are made by endpoint comparisons only, never
by thresholding a residual measure: a circle counts as covered exactly when
the canonical union leaves no gap.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateObstacle
from .geometry import IDENTITY_TOL, TAU, as_xy, normalize_angle

__all__ = ["ArcSet", "arc_union", "blocked_arc", "occlusion_intervals", "coverage_is_full"]


def _union_pieces(starts, widths):
    """Canonical union of raw circular intervals given as (start, width).

    Returns ``(pieces, full)``. ``pieces`` is a list of ``[s, e]`` with
    ``s`` in ``[0, 2pi)`` and ``s < e < s + 2pi``, sorted by ``s``, pairwise
    disjoint and non-touching; only the last piece may have ``e > 2pi``
    (a wrapping arc). ``full`` means the union is the whole circle.
    """
    s = np.asarray(starts, dtype=float)
    w = np.asarray(widths, dtype=float)
    keep = w > 0.0
    if not keep.all():
        s = s[keep]
        w = w[keep]
    if s.size == 0:
        return [], False
    if (w >= TAU).any():
        return [], True
    s = np.mod(s, TAU)
    s[s >= TAU] = 0.0  # float mod of a tiny negative can land on TAU
    e = s + w
    order = np.argsort(s, kind="stable")
    s = s[order]
    e = e[order]
    # vectorized interval merge on the unrolled line; touching intervals
    # merge because the arcs are half-open
    cmax = np.maximum.accumulate(e)
    new_group = np.empty(s.size, dtype=bool)
    new_group[0] = True
    new_group[1:] = s[1:] > cmax[:-1]
    first = np.flatnonzero(new_group)
    last = np.append(first[1:] - 1, s.size - 1)
    pieces = [[float(s[i]), float(cmax[j])] for i, j in zip(first, last)]
    # only the final piece can pass TAU (earlier ones would force starts >= TAU)
    tail = pieces[-1]
    if tail[1] - tail[0] >= TAU:
        return [], True
    if tail[1] > TAU:
        spill = tail[1] - TAU  # the part wrapped onto [0, spill)
        if spill >= tail[0]:
            return [], True
        while len(pieces) > 1 and pieces[0][0] <= spill:
            spill = max(spill, pieces[0][1])
            pieces.pop(0)
            if spill >= tail[0]:
                return [], True
        tail[1] = TAU + spill
    return pieces, False


class ArcSet:
    """A canonical union of disjoint half-open arcs on the circle.

    Instances are immutable. Arcs are reported as ``(start, end)`` pairs in
    ``[0, 2pi)``; a wrapping arc has ``end < start`` and there is at most one.
    """

    __slots__ = ("_pieces", "_full", "_flat")

    def __init__(self, _pieces=(), _full=False):
        # not meant to be called directly; use the class constructors
        self._pieces = tuple((float(a), float(b)) for a, b in _pieces)
        self._full = bool(_full)
        self._flat = None

    # -- constructors --------------------------------------------------

    @classmethod
    def empty(cls) -> "ArcSet":
        return cls()

    @classmethod
    def full_circle(cls) -> "ArcSet":
        return cls(_full=True)

    @classmethod
    def from_start_width(cls, items) -> "ArcSet":
        """Build from raw ``(start, width)`` pairs; widths >= 2pi give the full circle."""
        items = list(items)
        if not items:
            return cls.empty()
        starts, widths = zip(*items)
        pieces, full = _union_pieces(np.array(starts, float), np.array(widths, float))
        return cls(pieces, full)

    @classmethod
    def from_center_halfwidth(cls, items) -> "ArcSet":
        return cls.from_start_width((c - h, 2.0 * h) for c, h in items)

    @classmethod
    def from_intervals(cls, items) -> "ArcSet":
        """Build from ``(start, end)`` pairs read counterclockwise from start.

        ``end < start`` denotes an arc wrapping through ``2pi -> 0``.
        """
        return cls.from_start_width(
            (s, (e - s) if e >= s else (e - s) % TAU) for s, e in items
        )

    # -- basic queries ---------------------------------------------------

    @property
    def arcs(self) -> tuple:
        """Canonical arcs as ``(start, end)`` with angles in [0, 2pi)."""
        if self._full:
            return ((0.0, TAU),)
        out = []
        for s, e in self._pieces:
            out.append((s, e - TAU) if e > TAU else (s, e))
        return tuple(out)

    @property
    def is_empty(self) -> bool:
        return not self._full and not self._pieces

    @property
    def is_full(self) -> bool:
        return self._full

    def covers_full_circle(self) -> bool:
        return self._full

    @property
    def measure(self) -> float:
        if self._full:
            return TAU
        return float(sum(e - s for s, e in self._pieces))

    def _flattened(self):
        """Non-wrapping closed pieces within [0, 2pi], as (starts, ends) arrays."""
        if self._flat is None:
            segs = []
            if self._full:
                segs.append((0.0, TAU))
            else:
                for s, e in self._pieces:
                    if e > TAU:
                        segs.append((0.0, e - TAU))
                        segs.append((s, TAU))
                    else:
                        segs.append((s, e))
                segs.sort()
            starts = np.array([a for a, _ in segs], dtype=float)
            ends = np.array([b for _, b in segs], dtype=float)
            self._flat = (starts, ends)
        return self._flat

    def pieces(self):
        """Flattened non-wrapping ``[start, end]`` pieces, sorted, within [0, 2pi]."""
        starts, ends = self._flattened()
        return list(zip(starts.tolist(), ends.tolist()))

    def contains(self, theta: float) -> bool:
        """Half-open membership: arc ``[s, e)`` contains its start, not its end."""
        if self._full:
            return True
        t = normalize_angle(theta)
        starts, ends = self._flattened()
        i = int(np.searchsorted(starts, t, side="right")) - 1
        if i >= 0 and t < ends[i]:
            return True
        # a wrap arc flattened to [s, TAU] does not contain TAU ~ 0; its
        # [0, spill) half covers 0 itself, handled by the search above
        return False

    def contains_many(self, thetas: np.ndarray) -> np.ndarray:
        if self._full:
            return np.ones(np.shape(thetas), dtype=bool)
        starts, ends = self._flattened()
        if starts.size == 0:
            return np.zeros(np.shape(thetas), dtype=bool)
        t = np.mod(np.asarray(thetas, float), TAU)
        t[t >= TAU] = 0.0
        idx = np.searchsorted(starts, t, side="right") - 1
        ok = idx >= 0
        out = np.zeros(t.shape, dtype=bool)
        out[ok] = t[ok] < ends[idx[ok]]
        return out

    def endpoints(self) -> np.ndarray:
        """All arc endpoints, normalized to [0, 2pi), sorted."""
        if self._full or not self._pieces:
            return np.empty(0, dtype=float)
        vals = []
        for s, e in self._pieces:
            vals.append(s)
            vals.append(normalize_angle(e))
        return np.sort(np.array(vals, dtype=float))

    def near_boundary(self, theta: float, tol: float = IDENTITY_TOL) -> bool:
        """True when ``theta`` is within ``tol`` of an arc endpoint (the
        membership answer there is boundary-ambiguous)."""
        eps = self.endpoints()
        if eps.size == 0:
            return False
        t = normalize_angle(theta)
        d = np.abs(eps - t)
        return bool((np.minimum(d, TAU - d) <= tol).any())

    def near_boundary_many(self, thetas: np.ndarray, tol: float = IDENTITY_TOL) -> np.ndarray:
        eps = self.endpoints()
        t = np.mod(np.asarray(thetas, float), TAU)
        if eps.size == 0:
            return np.zeros(t.shape, dtype=bool)
        grid = np.concatenate([eps - TAU, eps, eps + TAU])
        grid.sort()
        pos = np.searchsorted(grid, t)
        lo = grid[np.maximum(pos - 1, 0)]
        hi = grid[np.minimum(pos, grid.size - 1)]
        return np.minimum(np.abs(t - lo), np.abs(hi - t)) <= tol

    def angular_distance(self, theta: float) -> float:
        """Circular distance from ``theta`` to the set (0 when inside)."""
        if self._full:
            return 0.0
        if self.is_empty:
            return math.inf
        if self.contains(theta):
            return 0.0
        t = normalize_angle(theta)
        eps = self.endpoints()
        d = np.abs(eps - t)
        return float(np.min(np.minimum(d, TAU - d)))

    # -- algebra ---------------------------------------------------------

    def union(self, other: "ArcSet") -> "ArcSet":
        return arc_union([self, other])

    def complement(self) -> "ArcSet":
        if self._full:
            return ArcSet.empty()
        if not self._pieces:
            return ArcSet.full_circle()
        gaps = []
        ps = self._pieces
        for (s0, e0), (s1, e1) in zip(ps, ps[1:]):
            gaps.append((normalize_angle(e0), s1 - normalize_angle(e0)))
        # the gap that closes the circle, from the last end back to the first start
        last_end = ps[-1][1]
        wrap_width = (ps[0][0] + TAU) - last_end
        if wrap_width > 0.0:
            gaps.append((normalize_angle(last_end), wrap_width))
        pieces, full = _union_pieces(
            np.array([g[0] for g in gaps]), np.array([g[1] for g in gaps])
        )
        return ArcSet(pieces, full)

    def intersect(self, other: "ArcSet") -> "ArcSet":
        return self.complement().union(other.complement()).complement()

    # -- misc --------------------------------------------------------------

    def render(self) -> str:
        """Canonical text form: ``FULL``, ``EMPTY`` or ``start:end;...`` in
        radians with 12 significant digits."""
        if self._full:
            return "FULL"
        if not self._pieces:
            return "EMPTY"
        return ";".join("%.12g:%.12g" % (s, normalize_angle(e)) for s, e in self._pieces)

    def __eq__(self, other):
        if not isinstance(other, ArcSet):
            return NotImplemented
        return self._full == other._full and self._pieces == other._pieces

    def __hash__(self):
        return hash((self._full, self._pieces))

    def __repr__(self):
        return "ArcSet(%s)" % self.render()


def arc_union(parts) -> ArcSet:
    """Canonical union of any number of ArcSets."""
    starts = []
    widths = []
    for p in parts:
        if p.is_full:
            return ArcSet.full_circle()
        for s, e in p._pieces:
            starts.append(s)
            widths.append(e - s)
    if not starts:
        return ArcSet.empty()
    pieces, full = _union_pieces(np.array(starts), np.array(widths))
    return ArcSet(pieces, full)


# ----------------------------------------------------------------------
# occlusion arcs


def _halfwidth(d: float, eps: float, horizon: float) -> float:
    """Half-width of the occlusion arc for an obstacle at distance d >= eps.

    Negative means the obstacle is out of reach (empty arc).
    """
    if math.isinf(horizon):
        return math.asin(eps / d)
    if d >= horizon + eps:
        return -1.0
    reach = math.sqrt(d * d - eps * eps)
    if reach <= horizon:
        return math.asin(eps / d)
    c = (d * d + horizon * horizon - eps * eps) / (2.0 * d * horizon)
    return math.acos(min(1.0, max(-1.0, c)))


def blocked_arc(x, y, eps: float, horizon: float = math.inf) -> ArcSet:
    """Directions from ``x`` in which the obstacle ``y`` comes within ``eps``
    of the ray (infinite horizon) or the length-``horizon`` segment.

    The condition is the open one, distance < eps. An obstacle closer than
    eps blocks every direction; one farther than horizon + eps blocks none.
    """
    if not (eps > 0.0):
        raise ValueError("eps must be positive")
    if not (horizon > 0.0):
        raise ValueError("horizon must be positive")
    xx, xy = as_xy(x)
    yx, yy = as_xy(y)
    dx, dy = yx - xx, yy - xy
    d = math.hypot(dx, dy)
    if d <= IDENTITY_TOL:
        raise DegenerateObstacle("obstacle coincides with the viewpoint")
    if d < eps:
        return ArcSet.full_circle()
    h = _halfwidth(d, eps, horizon)
    if h <= 0.0:
        return ArcSet.empty()
    center = math.atan2(dy, dx)
    return ArcSet.from_center_halfwidth([(center, h)])


def occlusion_intervals(dx: np.ndarray, dy: np.ndarray, eps: float, horizon: float):
    """Vectorized occlusion arcs for obstacle offsets ``(dx, dy)``.

    Returns ``(starts, widths, n_full, n_contributing)`` where ``n_full``
    counts obstacles closer than eps (each blocks the whole circle) and
    ``n_contributing`` counts obstacles with a nonempty arc, full ones
    included. Offsets within the identity tolerance are ignored.
    """
    d = np.hypot(dx, dy)
    live = d > IDENTITY_TOL
    full = live & (d < eps)
    n_full = int(np.count_nonzero(full))
    rest = live & ~full
    if math.isinf(horizon):
        sel = rest
        dd = d[sel]
        h = np.arcsin(eps / dd)
    else:
        rest &= d < horizon + eps
        sel = rest
        dd = d[sel]
        h = np.empty(dd.shape, dtype=float)
        reach = np.sqrt(np.maximum(dd * dd - eps * eps, 0.0))
        near = reach <= horizon
        h[near] = np.arcsin(eps / dd[near])
        far = ~near
        if far.any():
            c = (dd[far] * dd[far] + horizon * horizon - eps * eps) / (2.0 * dd[far] * horizon)
            h[far] = np.arccos(np.clip(c, -1.0, 1.0))
    centers = np.arctan2(dy[sel], dx[sel])
    pos = h > 0.0
    starts = centers[pos] - h[pos]
    widths = 2.0 * h[pos]
    return starts, widths, n_full, n_full + int(np.count_nonzero(pos))


def coverage_is_full(starts: np.ndarray, widths: np.ndarray) -> bool:
    """Whether the raw circular intervals cover the whole circle (exact,
    decided by endpoint comparisons via the canonical union)."""
    _, full = _union_pieces(starts, widths)
    return full
