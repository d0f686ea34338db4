"""Integer-scaled tree realization in discrete point sets.

An embedded tree is realized into an obstacle set by mapping each vertex to
a set point so that every edge's image differs from an integer multiple
(>= 1, per edge) of the original edge vector by less than eps. Realization
works edge by edge: from an anchor z and edge vector v, scan the targets
``z - k*v`` for increasing integer k and accept the first set point within
eps of one (smallest k, ties broken by distance then lexicographic order).

The bucket grid is the counting structure behind the exceptional-set
bounds: after rotating v to the first axis and rescaling by |v|, points are
binned by their second coordinate (slabs over [-r, r)) and the fractional
part of their first coordinate. Two points in one cell differ by an integer
multiple of v up to less than eps, forcing exceptional points (those with
no partner at any admissible scale) to be sparse: at most one per cell at
min_scale <= 1, at most ceil(2*min_scale/separation) per cell beyond.

Enumerations here are window-relative: a point can be "exceptional" merely
because its scan exits the window. Cardinality checks therefore compare
against the brute-force window definition; the analytic bound is reported
for context.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadDirection, BadParam, MissingSeparation, RealizationFailed
from .geometry import IDENTITY_TOL, as_xy
from .window import PointWindow

__all__ = [
    "PlaneTree", "Realization", "BucketGrid",
    "EdgeMatch", "realize_edge", "ExceptionalReport", "exceptional_set",
    "realize_tree",
]


@dataclass(frozen=True)
class PlaneTree:
    """A tree embedded in the plane: vertex coordinates plus index edges.

    Must be connected and acyclic (checked), with pairwise distinct
    vertices (1e-9).
    """

    vertices: tuple
    edges: tuple

    def __init__(self, vertices, edges):
        verts = tuple((float(x), float(y)) for x, y in vertices)
        eds = tuple((int(i), int(j)) for i, j in edges)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", eds)
        n = len(verts)
        if n == 0:
            raise BadParam("tree needs at least one vertex")
        if len(eds) != n - 1:
            raise BadParam("a tree on %d vertices needs exactly %d edges" % (n, n - 1))
        adj = [[] for _ in range(n)]
        for i, j in eds:
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise BadParam("bad edge (%d, %d)" % (i, j))
            adj[i].append(j)
            adj[j].append(i)
        seen = [False] * n
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        if not all(seen):
            raise BadParam("tree is not connected")
        for a in range(n):
            for b in range(a + 1, n):
                if math.hypot(verts[a][0] - verts[b][0],
                              verts[a][1] - verts[b][1]) <= IDENTITY_TOL:
                    raise BadParam("vertices %d and %d coincide" % (a, b))

    def children(self, root: int):
        """Parent->children orientation away from ``root``; children in
        index order (the deterministic traversal order)."""
        n = len(self.vertices)
        adj = [[] for _ in range(n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        for lst in adj:
            lst.sort()
        parent = [None] * n
        order = []
        stack = [root]
        seen = [False] * n
        seen[root] = True
        while stack:
            u = stack.pop(0)
            order.append(u)
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = u
                    stack.append(w)
        return parent, order


@dataclass(frozen=True)
class Realization:
    """A realized tree: vertex -> set point, directed edge -> integer scale."""

    assignment: tuple               # vertex index -> (x, y)
    scalings: tuple                 # ((parent, child, k), ...)
    eps: float

    def verify(self, tree: PlaneTree):
        """Re-check every edge inequality with fresh arithmetic; returns
        (ok, max_residual)."""
        worst = 0.0
        ok = True
        for parent, child, k in self.scalings:
            fx_p, fy_p = self.assignment[parent]
            fx_c, fy_c = self.assignment[child]
            ex, ey = self.tree_vec(tree, parent, child)
            res = math.hypot((fx_p - fx_c) - k * ex, (fy_p - fy_c) - k * ey)
            worst = max(worst, res)
            if not (res < self.eps and k >= 1):
                ok = False
        return ok, worst

    @staticmethod
    def tree_vec(tree: PlaneTree, parent: int, child: int):
        px, py = tree.vertices[parent]
        cx, cy = tree.vertices[child]
        return (px - cx, py - cy)


class BucketGrid:
    """Cells (i, j): second rotated coordinate slab x fractional first
    coordinate, in v-normalized coordinates (rotate v to the +x axis, then
    divide lengths by |v| so v itself becomes (1, 0)).

    n1 = ceil(4 r / eps) slabs partition [-r, r) / |v|; n2 = ceil(2 |v| / eps)
    intervals partition the fractional parts [0, 1). Points at or beyond the
    open ball of radius r are not binned.
    """

    def __init__(self, v, radius: float, eps: float, points=None):
        vx, vy = as_xy(v)
        V = math.hypot(vx, vy)
        if V <= IDENTITY_TOL:
            raise BadDirection("direction vector is zero")
        if not (eps > 0.0 and radius > 0.0):
            raise BadParam("need eps > 0 and radius > 0")
        self.v = (vx, vy)
        self.vnorm = V
        self.radius = float(radius)
        self.eps = float(eps)
        self.n1 = int(math.ceil(4.0 * radius / eps))
        self.n2 = int(math.ceil(2.0 * V / eps))
        self._c = vx / V
        self._s = vy / V
        self._rn = radius / V
        self.cells: dict = {}
        if points is not None:
            pts = np.asarray(points, dtype=float)
            for idx in range(pts.shape[0]):
                cell = self.cell_of(pts[idx])
                if cell is not None:
                    self.cells.setdefault(cell, []).append(idx)

    def normalized(self, p):
        """v-normalized coordinates of a point."""
        x, y = as_xy(p)
        u1 = (self._c * x + self._s * y) / self.vnorm
        u2 = (-self._s * x + self._c * y) / self.vnorm
        return u1, u2

    def cell_of(self, p):
        """Cell (i, j) of a point, or None when it falls outside B(0, r)."""
        x, y = as_xy(p)
        if math.hypot(x, y) >= self.radius:
            return None
        u1, u2 = self.normalized(p)
        d1 = 2.0 * self._rn / self.n1
        i = int(math.floor((u2 + self._rn) / d1))
        i = min(max(i, 0), self.n1 - 1)
        frac = u1 % 1.0
        if frac >= 1.0:
            frac = 0.0
        j = int(math.floor(frac * self.n2))
        j = min(j, self.n2 - 1)
        return (i, j)


@dataclass(frozen=True)
class EdgeMatch:
    w: tuple
    k: int
    residual: float


def realize_edge(z, v, eps: float, min_scale: int, window: PointWindow):
    """Find a partner w in the window with |(z - w) - k v| < eps for the
    smallest integer k >= min_scale; None when the scan exits the window
    without success (the point is window-exceptional for this direction,
    which says nothing about the unbounded set).

    Targets are z - k*v for growing k, scanned while they stay within the
    eps-dilated window so no in-window partner can be missed. Ties at the
    winning k are broken by distance, then lexicographic coordinates. The
    returned pair is re-verified before returning.
    """
    zx, zy = as_xy(z)
    vx, vy = as_xy(v)
    vnorm = math.hypot(vx, vy)
    if vnorm <= IDENTITY_TOL:
        raise BadDirection("edge direction must be nonzero")
    if not (eps > 0.0):
        raise BadParam("eps must be positive")
    if min_scale < 0:
        raise BadParam("min_scale must be >= 0")
    if len(window) == 0:
        return None
    limit = window.window_radius + eps
    k_hi = int(math.floor((math.hypot(zx, zy) + limit) / vnorm)) + 1
    if k_hi - min_scale > 5_000_000:
        raise BadParam("|v| is too small relative to the window for a scale scan")
    pts = window.points
    tree = window.tree
    chunk = 16
    for k0 in range(min_scale, k_hi + 1, chunk):
        ks = np.arange(k0, min(k0 + chunk, k_hi + 1), dtype=float)
        targets = np.column_stack([zx - ks * vx, zy - ks * vy])
        keep = np.hypot(targets[:, 0], targets[:, 1]) <= limit
        if not keep.any():
            continue
        dist, _ = tree.query(targets[keep], k=1)
        hit_ks = ks[keep][np.asarray(dist) < eps]
        for kv in hit_ks:
            target = (zx - kv * vx, zy - kv * vy)
            best = None
            for ci in tree.query_ball_point(target, eps * (1.0 + 1e-12)):
                wx, wy = pts[ci]
                if math.hypot(wx - zx, wy - zy) <= IDENTITY_TOL:
                    continue
                res = math.hypot((zx - wx) - kv * vx, (zy - wy) - kv * vy)
                if res < eps:
                    key = (res, wx, wy)
                    if best is None or key < best:
                        best = key
            if best is not None:
                res, wx, wy = best
                return EdgeMatch((wx, wy), int(kv), res)
    return None


@dataclass(frozen=True)
class ExceptionalReport:
    exceptional: tuple
    bound: int
    checked: int
    grid: BucketGrid = field(repr=False, compare=False, default=None)


def exceptional_set(window: PointWindow, v, eps: float, min_scale: int,
                    r: float) -> ExceptionalReport:
    """Enumerate the window points inside B(0, r) for which ``realize_edge``
    finds no partner, together with the analytic cell-count bound.

    min_scale = 0 is the unconstrained variant (any k >= 0); min_scale > 1
    needs a declared separation on the window for its bound.
    """
    if r > window.window_radius + 1e-9:
        raise BadParam("r exceeds the window radius")
    grid = BucketGrid(v, r, eps, window.points)
    if min_scale > 1:
        if window.declared_separation is None:
            raise MissingSeparation("min_scale > 1 needs declared_separation")
        per_cell = int(math.ceil(2.0 * min_scale / window.declared_separation))
    else:
        per_cell = 1
    bound = grid.n1 * grid.n2 * per_cell

    inside = window.norms < r
    order = np.flatnonzero(inside)
    pts = window.points
    coords = pts[order]
    sort = np.lexsort((coords[:, 1], coords[:, 0]))
    order = order[sort]
    exceptional = []
    for i in order:
        if realize_edge(pts[i], v, eps, min_scale, window) is None:
            exceptional.append((float(pts[i][0]), float(pts[i][1])))
    return ExceptionalReport(tuple(exceptional), bound, int(inside.sum()), grid)


def realize_tree(tree: PlaneTree, root: int, y0, window: PointWindow,
                 eps: float) -> Realization:
    """Realize a rooted tree from the anchor y0 (a window point).

    Splits at the root and recurses: each root edge is realized via
    ``realize_edge`` with direction (root vertex - child vertex) and
    min_scale 1, then the child's subtree is realized from the found
    partner. Children are processed in index order and each edge takes the
    smallest admissible scale, so the result is deterministic.
    """
    n = len(tree.vertices)
    if not (0 <= root < n):
        raise BadParam("root index out of range")
    y0x, y0y = as_xy(y0)
    d, i0 = window.tree.query((y0x, y0y), k=1)
    if d > IDENTITY_TOL:
        raise BadParam("anchor y0 is not a window point")
    anchor = (float(window.points[i0][0]), float(window.points[i0][1]))

    parent, order = tree.children(root)
    assignment = [None] * n
    assignment[root] = anchor
    scalings = []
    for u in order:
        if u == root:
            continue
        par = parent[u]
        vx = tree.vertices[par][0] - tree.vertices[u][0]
        vy = tree.vertices[par][1] - tree.vertices[u][1]
        match = realize_edge(assignment[par], (vx, vy), eps, 1, window)
        if match is None:
            raise RealizationFailed(
                "no partner for edge (%d, %d) inside the window" % (par, u), vertex=u)
        assignment[u] = match.w
        scalings.append((par, u, match.k))
    real = Realization(tuple(assignment), tuple(scalings), float(eps))
    ok, worst = real.verify(tree)
    if not ok:
        raise RuntimeError("realization failed re-verification (residual %g)" % worst)
    return real
