"""Explicit obstacle sets and reference scenes.

Two constructions carry the interesting structure:

* ``spiral_window`` - the slowly winding point spiral with radii
  ``k * ln k`` and angles ``sqrt(ln ln k)``; its growth satisfies
  ``G(r) * ln r / r -> 1`` while every ray in the plane is approached
  arbitrarily closely.

* ``puncture_construct`` - the punctured integer lattice: for each of the
  first K lattice points an arithmetic ray of lattice points is removed so
  the point gains a clear line of sight, while the removed set stays
  sparse (growth < eps * r), mutually M-separated, and the kept set stays
  sqrt(2)-dense. Slopes ``m_k`` are chosen as the smallest admissible
  integers, so the construction is reproducible.

``generate_window`` supplies the plain reference scenes (lattice, perturbed
lattice, Poisson); ``verify_window`` and ``verify_puncture_conditions``
check declared metric properties by brute force, grid-accelerated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadIndex, BadParam, MissingMetadata, SearchOverflow
from .geometry import as_xy
from .window import PointWindow, Provenance

__all__ = [
    "SpiralParams", "spiral_window", "spiral_points",
    "PunctureParams", "PunctureResult", "lattice_enumeration", "puncture_construct",
    "generate_window", "WindowReport", "verify_window",
    "PunctureConditionReport", "verify_puncture_conditions",
]


# ----------------------------------------------------------------------
# spiral

@dataclass(frozen=True)
class SpiralParams:
    """Index range of the spiral; angles are real only from k = 3 on
    (ln ln 2 < 0)."""

    k_min: int
    k_max: int

    def __post_init__(self):
        if self.k_min < 3:
            raise BadIndex("k_min must be >= 3; the angle sqrt(ln ln k) is not real below")
        if self.k_max < self.k_min:
            raise BadIndex("k_max must be >= k_min")


def spiral_points(k_min: int, k_max: int) -> np.ndarray:
    """Points ``(r_k cos(phi_k), r_k sin(phi_k))`` for k in [k_min, k_max],
    with ``r_k = k ln k`` and ``phi_k = sqrt(ln ln k)``."""
    if k_min < 3:
        raise BadIndex("k_min must be >= 3")
    k = np.arange(k_min, k_max + 1, dtype=float)
    r = k * np.log(k)
    phi = np.sqrt(np.log(np.log(k)))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def spiral_window(params: SpiralParams) -> PointWindow:
    pts = spiral_points(params.k_min, params.k_max)
    radius = float(params.k_max) * math.log(float(params.k_max))
    return PointWindow(
        pts, radius,
        provenance=Provenance("spiral", None, {"k_min": params.k_min, "k_max": params.k_max}),
    )


# ----------------------------------------------------------------------
# punctured lattice

@dataclass(frozen=True)
class PunctureParams:
    eps: float
    M: float
    K: int
    window_radius: float
    # per-slope scan budget before giving up (signals a too-small ceiling,
    # not a failure of the construction)
    search_limit: int = 2_000_000

    def __post_init__(self):
        if not (0.0 < self.eps <= 1.0):
            raise BadParam("eps must lie in (0, 1]")
        if not (self.M > 1.0):
            raise BadParam("M must exceed 1")
        if self.K < 1:
            raise BadParam("K must be >= 1")
        if not (self.window_radius > 0.0):
            raise BadParam("window_radius must be positive")


@dataclass(frozen=True)
class PunctureResult:
    """The kept window, the removed window, and the audit trail (slopes,
    anchor points, and the analytic lower bound each slope had to beat)."""

    m: tuple
    z: tuple
    bounds: tuple
    Y_window: PointWindow
    removed_window: PointWindow
    params: PunctureParams


def lattice_enumeration(count: int) -> np.ndarray:
    """First ``count`` points of the bundled enumeration of the integer
    lattice: ring by ring (sup-norm), each ring ordered by polar angle.

    The ordering is prefix-closed: the first n entries are always the same
    regardless of ``count``.
    """
    if count < 1:
        raise BadParam("count must be >= 1")
    out = [(0, 0)]
    ring = 0
    while len(out) < count:
        ring += 1
        side = range(-ring, ring + 1)
        pts = [(i, j) for i in side for j in side if max(abs(i), abs(j)) == ring]
        pts.sort(key=lambda p: math.atan2(p[1], p[0]) % (2.0 * math.pi))
        out.extend(pts)
    return np.array(out[:count], dtype=np.int64)


def _lattice_disk(W: float) -> np.ndarray:
    """Integer points with norm <= W, ordered by (i, j)."""
    n = int(math.floor(W))
    i = np.arange(-n, n + 1, dtype=np.int64)
    ii, jj = np.meshgrid(i, i, indexing="ij")
    mask = ii * ii + jj * jj <= W * W
    return np.column_stack([ii[mask], jj[mask]])


def _ray_pair_clear(m_j: int, z_j, m_k: int, z_k, M: float, chunk: int = 1 << 17) -> bool:
    """Exact check that the two removed rays stay more than M apart.

    Ray j is {z_j + a*(m_j, 1) : a >= 1}, ray k likewise with slope m_k > m_j.
    Any pair closer than M must have |Delta_y| <= M, which pins the index
    gap b - a to a band of width 2M+1; within the band |Delta_x| grows like
    a*(m_k - m_j), so only indices a below an explicit cutoff can violate.
    Those finitely many pairs are checked in exact integer arithmetic.
    """
    dzx = int(z_j[0]) - int(z_k[0])
    dzy = int(z_j[1]) - int(z_k[1])
    gap = m_k - m_j
    if gap <= 0:
        raise BadParam("slopes must be strictly increasing")
    band = int(math.floor(M)) + 1  # |b - a - dzy| <= M
    limit = M + abs(dzx) + (abs(dzy) + M + 1.0) * m_k
    a_max = int(limit // gap) + 1
    m2 = M * M
    offs = np.arange(-band, band + 1, dtype=np.int64)
    a0 = 1
    while a0 <= a_max:
        a1 = min(a_max, a0 + chunk - 1)
        a = np.arange(a0, a1 + 1, dtype=np.int64)
        b = a[:, None] + dzy + offs[None, :]
        dy = dzy + a[:, None] - b
        dx = dzx + a[:, None] * m_j - b * m_k
        # square only the small candidates; dx itself can be ~1e14
        cand = (b >= 1) & (np.abs(dy) <= M) & (np.abs(dx) <= M)
        if cand.any():
            fx = dx[cand].astype(float)
            fy = dy[cand].astype(float)
            if np.any(fx * fx + fy * fy <= m2):
                return False
        a0 = a1 + 1
    return True


def _select_slopes(params: PunctureParams, zs: np.ndarray):
    eps, M, K = params.eps, params.M, params.K
    ms: list[int] = []
    bounds: list[float] = []
    for k in range(1, K + 1):
        z = zs[k - 1]
        znorm = math.hypot(float(z[0]), float(z[1]))
        if k == 1:
            lower = max(M, 4.0 / eps, 2.0 * znorm)
        else:
            lower = max((2.0 ** k) / eps, 2.0 * znorm, float(ms[-1]))
        bounds.append(lower)
        m = int(math.floor(lower)) + 1
        tried = 0
        while True:
            tried += 1
            if tried > params.search_limit:
                raise SearchOverflow(
                    "no admissible slope below the configured ceiling for k=%d" % k
                )
            ok = all(
                _ray_pair_clear(ms[j], zs[j], m, z, M) for j in range(len(ms))
            )
            if ok:
                ms.append(m)
                break
            m += 1
    return ms, bounds


def puncture_construct(params: PunctureParams, enumeration=None) -> PunctureResult:
    """Build the punctured lattice restricted to the window.

    ``enumeration`` defaults to the bundled prefix-closed lattice ordering;
    its first K entries are the points that get a cleared ray.
    """
    if enumeration is None:
        enumeration = lattice_enumeration(params.K)
    zs = np.asarray(enumeration, dtype=np.int64)
    if zs.ndim != 2 or zs.shape[1] != 2 or zs.shape[0] < params.K:
        raise BadParam("enumeration must provide at least K lattice points")
    zs = zs[: params.K]

    ms, bounds = _select_slopes(params, zs)

    W = params.window_radius
    removed = []
    for m, z in zip(ms, zs):
        n = 1
        while True:
            p = (int(z[0]) + n * m, int(z[1]) + n)
            if p[0] * p[0] + p[1] * p[1] > W * W:
                break
            removed.append(p)
            n += 1
    removed_arr = (
        np.array(sorted(set(removed)), dtype=np.int64)
        if removed else np.empty((0, 2), dtype=np.int64)
    )
    # rays more than M apart can never share a point
    assert len(removed_arr) == len(removed)

    lattice = _lattice_disk(W)
    span = int(math.floor(W)) * 2 + 1
    off = int(math.floor(W))

    def keys(a):
        return (a[:, 0] + off) * span + (a[:, 1] + off)

    if len(removed_arr):
        drop = np.isin(keys(lattice), keys(removed_arr))
    else:
        drop = np.zeros(len(lattice), dtype=bool)
    kept = lattice[~drop]

    prov = {"eps": params.eps, "M": params.M, "K": params.K, "W": W,
            "m": [int(v) for v in ms]}
    y_window = PointWindow(
        kept.astype(float), W, declared_separation=1.0,
        declared_density_radius=math.sqrt(2.0),
        provenance=Provenance("puncture", None, prov),
    )
    removed_window = PointWindow(
        removed_arr.astype(float), W, declared_separation=params.M,
        provenance=Provenance("puncture_removed", None, prov),
    )
    return PunctureResult(
        m=tuple(int(v) for v in ms),
        z=tuple((int(a), int(b)) for a, b in zs),
        bounds=tuple(float(b) for b in bounds),
        Y_window=y_window,
        removed_window=removed_window,
        params=params,
    )


# ----------------------------------------------------------------------
# reference scenes

_STREAMS = {"lattice": 0, "perturbed_lattice": 1, "poisson": 2}


def _rng(kind: str, seed: int) -> np.random.Generator:
    # counter-based derivation: one child stream per generator kind
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(_STREAMS[kind],))
    return np.random.Generator(np.random.PCG64(ss))


def generate_window(kind: str, W: float, seed: int = 0, amplitude: float = None,
                    intensity: float = None) -> PointWindow:
    """Reference scenes. Identical (kind, W, seed) always yields the
    identical point list.

    * ``lattice``: integer points with norm <= W; separation 1, density sqrt(2).
    * ``perturbed_lattice``: lattice plus a seeded uniform offset in
      [-a, a]^2 per point; separation 1 - 2a.
    * ``poisson``: homogeneous Poisson sample of the given intensity.
    """
    if not (W > 0.0):
        raise BadParam("W must be positive")
    if kind == "lattice":
        pts = _lattice_disk(W).astype(float)
        return PointWindow(pts, W, declared_separation=1.0,
                           declared_density_radius=math.sqrt(2.0),
                           provenance=Provenance("lattice", seed, {"W": W}))
    if kind == "perturbed_lattice":
        a = float(amplitude if amplitude is not None else 0.0)
        if not (0.0 <= a < 0.5):
            raise BadParam("amplitude must lie in [0, 0.5)")
        base = _lattice_disk(W).astype(float)
        if a > 0.0:
            offs = _rng(kind, seed).uniform(-a, a, size=base.shape)
            pts = base + offs
            radius = W + a * math.sqrt(2.0)
        else:
            pts = base
            radius = W
        sep = 1.0 - 2.0 * a
        return PointWindow(pts, radius, declared_separation=sep,
                           declared_density_radius=math.sqrt(2.0) * (1.0 + a),
                           provenance=Provenance(kind, seed, {"W": W, "amplitude": a}))
    if kind == "poisson":
        lam = float(intensity if intensity is not None else 0.0)
        if not (lam > 0.0):
            raise BadParam("intensity must be positive")
        rng = _rng(kind, seed)
        n = int(rng.poisson(lam * math.pi * W * W))
        r = W * np.sqrt(rng.uniform(0.0, 1.0, n))
        th = rng.uniform(0.0, 2.0 * math.pi, n)
        pts = np.column_stack([r * np.cos(th), r * np.sin(th)])
        return PointWindow(pts, W,
                           provenance=Provenance(kind, seed, {"W": W, "intensity": lam}))
    raise BadParam("unknown window kind %r" % kind)


# ----------------------------------------------------------------------
# verification

@dataclass(frozen=True)
class WindowReport:
    growth_samples: tuple
    separation_ok: bool | None
    density_ok: bool | None
    min_pair_distance: float | None = None


def verify_window(window: PointWindow, growth_radii=(), check_separation=None,
                  check_density=None, density_spacing=None) -> WindowReport:
    """Check a window against its declared metadata.

    Growth counts are exact. Separation is checked exactly over all pairs
    (KD-tree accelerated). Density is checked on a grid of centers with
    spacing <= R/4 inside radius W - R, which certifies a density radius of
    at most R + R*sqrt(2)/4. Pass ``check_separation``/``check_density`` as
    True to demand a check (MissingMetadata if nothing was declared), None
    to check whatever is declared.
    """
    growth = tuple((float(r), window.count_within(float(r))) for r in growth_radii)

    sep_ok = None
    min_pair = None
    want_sep = check_separation or (check_separation is None and
                                    window.declared_separation is not None)
    if want_sep:
        if window.declared_separation is None:
            raise MissingMetadata("no declared_separation to check")
        delta = window.declared_separation
        if len(window) >= 2:
            pairs = window.tree.query_pairs(r=delta * (1.0 + 1e-12), output_type="ndarray")
            if len(pairs):
                d = np.hypot(*(window.points[pairs[:, 0]] - window.points[pairs[:, 1]]).T)
                min_pair = float(d.min())
                sep_ok = bool(min_pair >= delta)
            else:
                sep_ok = True
        else:
            sep_ok = True

    den_ok = None
    want_den = check_density or (check_density is None and
                                 window.declared_density_radius is not None)
    if want_den:
        if window.declared_density_radius is None:
            raise MissingMetadata("no declared_density_radius to check")
        R = window.declared_density_radius
        inner = window.window_radius - R
        if inner <= 0:
            den_ok = True
        else:
            spacing = density_spacing if density_spacing is not None else R / 4.0
            if spacing > R / 4.0:
                raise BadParam("density grid spacing must be <= R/4")
            n = int(math.floor(inner / spacing))
            ax = np.arange(-n, n + 1, dtype=float) * spacing
            xs, ys = np.meshgrid(ax, ax, indexing="ij")
            centers = np.column_stack([xs.ravel(), ys.ravel()])
            centers = centers[np.hypot(centers[:, 0], centers[:, 1]) <= inner]
            den_ok = True
            for lo in range(0, len(centers), 1 << 18):
                d, _ = window.tree.query(centers[lo:lo + (1 << 18)],
                                         distance_upper_bound=R * (1.0 + 1e-12))
                if not np.all(np.isfinite(d)):
                    den_ok = False
                    break
    return WindowReport(growth, sep_ok, den_ok, min_pair)


@dataclass(frozen=True)
class PunctureConditionReport:
    growth_ok: bool
    separation_ok: bool
    min_separation: float
    density_ok: bool
    witness_ok: bool
    witness_distances: tuple
    m1: int


def verify_puncture_conditions(result: PunctureResult, grid_spacing: float = 0.25,
                               tol: float = 1e-9) -> PunctureConditionReport:
    """Check the four declared properties of a punctured-lattice window.

    1. each anchor z_k keeps a clear ray: every kept point off the ray's
       supporting line is at distance >= 1/sqrt(m_k^2+1) from the ray
       (exact integer cross products, one final square root);
    2. removed-set growth: #removed inside radius r stays below eps*r for
       every integer r up to the window radius;
    3. the kept set is sqrt(2)-dense: every center of a ``grid_spacing``
       grid inside B(0, W-2) has a kept point within sqrt(2);
    4. removed points are pairwise at least M apart (exact integers).
    """
    params = result.params
    W = params.window_radius
    removed = result.removed_window.points.astype(np.int64)
    kept = result.Y_window.points.astype(np.int64)

    # (2) growth of the removed set, strict count below every integer radius
    rn = np.sort(np.hypot(removed[:, 0].astype(float), removed[:, 1].astype(float)))
    radii = np.arange(1, int(math.floor(W)) + 1, dtype=float)
    counts = np.searchsorted(rn, radii, side="left")
    growth_ok = bool(np.all(counts < params.eps * radii))

    # (4) pairwise separation of the removed set, exact
    if len(removed) >= 2:
        diff = removed[:, None, :] - removed[None, :, :]
        d2 = diff[..., 0] ** 2 + diff[..., 1] ** 2
        iu = np.triu_indices(len(removed), k=1)
        min_d2 = int(d2[iu].min())
        min_sep = math.sqrt(min_d2)
        separation_ok = min_d2 >= params.M * params.M
    else:
        min_sep = math.inf
        separation_ok = True

    # (3) sqrt(2)-density of the kept set on a grid inside B(0, W-2).
    # A center's unit cell has two horizontally adjacent corners inside the
    # open sqrt(2)-ball; the removed set is M-separated with M > sqrt(2), so
    # at most one of them can be removed. Centers near no removed point pass
    # automatically; the rest are checked explicitly.
    inner = W - 2.0
    span = int(math.floor(W)) * 2 + 1
    off = int(math.floor(W))
    removed_keys = (removed[:, 0] + off) * span + (removed[:, 1] + off)
    removed_keys = np.sort(removed_keys)
    density_ok = True
    n = int(math.floor(inner / grid_spacing))
    ax = np.arange(-n, n + 1, dtype=float) * grid_spacing
    inner2 = inner * inner
    kd = None
    for lo in range(0, ax.size, 512):
        xs = ax[lo:lo + 512]
        cx, cy = np.meshgrid(xs, ax, indexing="ij")
        cx = cx.ravel()
        cy = cy.ravel()
        m = cx * cx + cy * cy <= inner2
        cx = cx[m]
        cy = cy[m]
        fx = np.floor(cx).astype(np.int64)
        fy = np.floor(cy).astype(np.int64)
        k1 = (fx + off) * span + (fy + off)
        k2 = (fx + 1 + off) * span + (fy + off)
        bad1 = np.isin(k1, removed_keys)
        bad2 = np.isin(k2, removed_keys)
        both = bad1 & bad2
        if both.any():
            # fall back to an explicit neighborhood search before failing
            if kd is None:
                kd = result.Y_window.tree
            d, _ = kd.query(np.column_stack([cx[both], cy[both]]))
            if np.any(d >= math.sqrt(2.0)):
                density_ok = False
                break

    # (1) clear-ray witnesses, exact integers
    witness = []
    witness_ok = True
    for m, z in zip(result.m, result.z):
        dx = kept[:, 0] - z[0]
        dy = kept[:, 1] - z[1]
        cross = dx - np.int64(m) * dy          # v x d up to sign, v = (m, 1)
        along = np.int64(m) * dx + dy          # foot parameter * |v|^2
        self_mask = (dx == 0) & (dy == 0)
        online = (cross == 0) & ~self_mask
        # ahead-of-origin points on the line would sit on the removed ray
        if np.any(online & (along > 0)):
            witness_ok = False
            witness.append(0.0)
            continue
        vnorm = math.hypot(m, 1.0)
        best = math.inf
        offline = ~online & ~self_mask
        if np.any(offline):
            ahead = offline & (along >= 0)
            if np.any(ahead):
                best = int(np.abs(cross[ahead]).min()) / vnorm
            behind = offline & (along < 0)
            if np.any(behind):
                d2 = dx[behind].astype(float) ** 2 + dy[behind].astype(float) ** 2
                best = min(best, math.sqrt(float(d2.min())))
        if np.any(online):
            d2 = dx[online].astype(float) ** 2 + dy[online].astype(float) ** 2
            best = min(best, math.sqrt(float(d2.min())))
        witness.append(best)
        if best < 1.0 / vnorm - tol:
            witness_ok = False

    return PunctureConditionReport(
        growth_ok=growth_ok,
        separation_ok=bool(separation_ok),
        min_separation=float(min_sep),
        density_ok=density_ok,
        witness_ok=witness_ok,
        witness_distances=tuple(witness),
        m1=int(result.m[0]),
    )
