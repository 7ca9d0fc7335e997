"""Geometry of the bisector ``B(x, y) = {z : ||z - x|| = ||z - y||}``.

Root finding along lines parallel to ``y - x`` is the workhorse: on such a
line ``h(t) = ||L(t) - x|| - ||L(t) - y||`` is nondecreasing (a unit-step
difference of a convex function) and tends to ``-||y - x||`` and
``+||y - x||`` at the two ends, so bisection always brackets its zero set.
That zero set is a point or a closed interval, and both ends are reported.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateInput
from .norms import (
    DEFAULT_TOL,
    FlatSegment,
    NormSpec,
    as_vector,
    canonical_sign,
    flat_segment_parallel_to,
    plane_basis,
    planar_face,
)

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class Bisector:
    norm: NormSpec
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = as_vector(self.x, self.norm.dim, "x")
        y = as_vector(self.y, self.norm.dim, "y")
        if np.array_equal(x, y):
            raise DegenerateInput("bisector needs two distinct points")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def direction(self) -> np.ndarray:
        return self.y - self.x

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.x + self.y)

    def h(self, z) -> np.ndarray:
        """``||z - x|| - ||z - y||`` along the last axis."""
        z = np.asarray(z, dtype=float)
        return self.norm.difference(z - self.x, z - self.y)


def membership(b: Bisector, z, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Whether ``z`` is equidistant from ``x`` and ``y``, with the absolute residual."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    z = as_vector(z, b.norm.dim, "z")
    dx = float(b.norm.evaluate(z - b.x))
    residual = abs(float(b.h(z)))
    return residual <= tol * max(1.0, dx), residual


# ---------------------------------------------------------------------------
# line intersections


def line_roots(b: Bisector, anchors, iterations: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Leftmost and rightmost zero of ``h`` on each line ``anchor + t (y - x)``.

    Vectorised over a ``(k, d)`` array of anchors; returns two length-``k``
    arrays of line parameters.
    """
    A = np.atleast_2d(np.asarray(anchors, dtype=float))
    n = b.norm
    d = b.direction
    nd = float(n.evaluate(d))
    nc = n.evaluate(A - b.midpoint)
    scale = nc + nd
    # Facet norms have genuine zero intervals that are only exact up to the
    # evaluation noise floor; smooth norms have a single root and a
    # cancellation-free difference, so their predicates need no slack.
    eps = 0.0 * scale if n.is_smooth else 16.0 * _EPS * (scale + n.evaluate(A))

    def h(t):
        return b.h(A + t[:, None] * d)

    span = 1.0 + 2.0 * nc / nd
    lo, hi = -span.copy(), span.copy()
    for _ in range(200):
        bad_lo = h(lo) >= -eps
        bad_hi = h(hi) <= eps
        if not (bad_lo.any() or bad_hi.any()):
            break
        lo = np.where(bad_lo, 2.0 * lo, lo)
        hi = np.where(bad_hi, 2.0 * hi, hi)
    else:
        raise DegenerateInput("could not bracket the bisector on some line")

    l_lo, l_hi = lo.copy(), hi.copy()
    r_lo, r_hi = lo.copy(), hi.copy()
    for _ in range(iterations):
        m = 0.5 * (l_lo + l_hi)
        below = h(m) < -eps
        l_lo = np.where(below, m, l_lo)
        l_hi = np.where(below, l_hi, m)
        m = 0.5 * (r_lo + r_hi)
        above = h(m) > eps
        r_hi = np.where(above, m, r_hi)
        r_lo = np.where(above, r_lo, m)
    return 0.5 * (l_lo + l_hi), 0.5 * (r_lo + r_hi)


def line_intersect(b: Bisector, anchor, tol: float = DEFAULT_TOL, iterations: int = 50) -> list[np.ndarray]:
    """Intersection of ``B(x, y)`` with the line through ``anchor`` parallel to ``y - x``.

    One point when the two extreme roots agree within ``tol``, otherwise the
    two ends of the intersection interval.
    """
    a = as_vector(anchor, b.norm.dim, "anchor")
    tl, tr = line_roots(b, a[None, :], iterations)
    tl, tr = float(tl[0]), float(tr[0])
    d = b.direction
    gap = (tr - tl) * np.linalg.norm(d)
    if gap <= tol * max(1.0, np.linalg.norm(a - b.midpoint)):
        return [a + 0.5 * (tl + tr) * d]
    return [a + tl * d, a + tr * d]


def sample_bisector(b: Bisector, anchors, tol: float = DEFAULT_TOL, iterations: int = 50) -> np.ndarray:
    """All points returned by :func:`line_intersect` for a batch of anchors."""
    A = np.atleast_2d(np.asarray(anchors, dtype=float))
    tl, tr = line_roots(b, A, iterations)
    d = b.direction
    scale = np.maximum(1.0, np.linalg.norm(A - b.midpoint, axis=1))
    split = (tr - tl) * np.linalg.norm(d) > tol * scale
    mid = A + (0.5 * (tl + tr))[:, None] * d
    left = A[split] + tl[split, None] * d
    right = A[split] + tr[split, None] * d
    return np.vstack([mid[~split], left, right])


# ---------------------------------------------------------------------------
# the bounding region of strictly convex directions


@dataclass(frozen=True)
class RegionBounds:
    p: np.ndarray
    line_through_x: tuple[np.ndarray, np.ndarray]
    line_through_y: tuple[np.ndarray, np.ndarray]
    normal: np.ndarray

    def ratio(self, z) -> float:
        """Position of ``z`` across the strip: 0 on the line through x, 1 on the line through y."""
        x = self.line_through_x[0]
        y = self.line_through_y[0]
        return float(np.dot(self.normal, np.asarray(z) - x) / np.dot(self.normal, y - x))


def region_bounds(b: Bisector, plane=None, tol: float = DEFAULT_TOL) -> Optional[RegionBounds]:
    """The open strip containing ``B(x, y)``, or ``None`` when a flat segment is parallel to ``y - x``.

    ``plane`` is a 2-D subspace containing ``y - x``; required above dimension two.
    """
    n = b.norm
    d = b.direction
    E = plane_basis(n, plane, must_contain=d)
    if flat_segment_parallel_to(n, d, None if n.dim == 2 else E.T, tol) is not None:
        return None
    d2 = E.T @ d
    w = canonical_sign(np.array([-d2[1], d2[0]]))
    p = planar_face(n, E, w, tol)[0]
    p2 = E.T @ p
    normal = E @ np.array([-p2[1], p2[0]])
    return RegionBounds(p, (b.x, p), (b.y, p), normal)


# ---------------------------------------------------------------------------
# flat segments produce two-dimensional cones inside the bisector


@dataclass(frozen=True)
class FlatRayCone:
    apex: np.ndarray
    gen_a: np.ndarray
    gen_b: np.ndarray

    def point(self, s, t) -> np.ndarray:
        s = np.asarray(s, dtype=float)[..., None]
        t = np.asarray(t, dtype=float)[..., None]
        return self.apex + s * self.gen_a + t * self.gen_b


def flat_ray_cone(b: Bisector, seg: FlatSegment) -> FlatRayCone:
    """Cone ``{x + b/lambda + s a + t b : s, t >= 0}`` contained in ``B(x, y)``, where ``a - b = lambda (x - y)``."""
    n = b.norm
    a, bb = as_vector(seg.a, n.dim, "a"), as_vector(seg.b, n.dim, "b")
    u = a - bb
    v = b.x - b.y
    lam = float(np.dot(u, v) / np.dot(v, v))
    if lam <= 0 or np.linalg.norm(u - lam * v) > 1e-9 * np.linalg.norm(u):
        raise DegenerateInput("segment is not a positive multiple of x - y")
    apex = b.x + float(n.evaluate(v) / n.evaluate(u)) * bb
    return FlatRayCone(apex, a, bb)


# ---------------------------------------------------------------------------
# slab fitting


def fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    r = np.sqrt(1.0 - z * z)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _direction_grid(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 2:
        ang = np.linspace(0.0, math.pi, count, endpoint=False)
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if dim == 3:
        return fibonacci_sphere(count)
    g = rng.standard_normal((count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _width(Z: np.ndarray, normals: np.ndarray) -> np.ndarray:
    proj = Z @ np.atleast_2d(normals).T
    return proj.max(axis=0) - proj.min(axis=0)


def _refine_normal(Z: np.ndarray, nu: np.ndarray, step: float = 0.05, min_step: float = 1e-12) -> np.ndarray:
    best = float(_width(Z, nu)[0])
    while step > min_step:
        basis = np.linalg.svd(nu[None, :])[2][1:]
        trial = np.vstack([nu + step * basis, nu - step * basis])
        trial /= np.linalg.norm(trial, axis=1, keepdims=True)
        w = _width(Z, trial)
        k = int(np.argmin(w))
        if w[k] < best:
            best, nu = float(w[k]), trial[k]
        else:
            step *= 0.5
    return nu


def thinnest_slab(Z: np.ndarray, grid: np.ndarray) -> tuple[np.ndarray, float]:
    """Unit normal minimising the width of the point set, and that width."""
    centred = Z - Z.mean(axis=0)
    pca = np.linalg.svd(centred, full_matrices=False)[2][-1]
    cands = np.vstack([pca, grid])
    w = _width(Z, cands)
    best_nu, best_w = cands[0], float(w[0])
    for k in np.argsort(w)[:3]:
        nu = _refine_normal(Z, cands[k])
        wk = float(_width(Z, nu)[0])
        if wk < best_w:
            best_nu, best_w = nu, wk
    return canonical_sign(best_nu), best_w


@dataclass
class SlabFit:
    normal: np.ndarray
    lo: float
    hi: float
    max_violation: float
    sample_radius: float
    radii: list[float]
    widths_by_radius: list[float]
    verdict: str
    growth: float
    samples: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "normal": [float(v) for v in self.normal],
            "lo": float(self.lo),
            "hi": float(self.hi),
            "max_violation": float(self.max_violation),
            "sample_radius": float(self.sample_radius),
            "radii": [float(r) for r in self.radii],
            "widths_by_radius": [float(w) for w in self.widths_by_radius],
            "growth": float(self.growth),
            "verdict": self.verdict,
        }

    def samples_csv(self) -> str:
        """Rows ``radius,coord_1,...,coord_d,residual``."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        d = self.samples.shape[1] - 2
        writer.writerow(["radius"] + [f"coord_{i + 1}" for i in range(d)] + ["residual"])
        for row in self.samples:
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def slab_fit(
    b: Bisector,
    radii: Optional[Sequence[float]] = None,
    samples_per_radius: int = 128,
    seed: int = 0,
    growth_factor: float = 4.0,
    flat_tol: float = 1e-8,
    grid_size: int = 2000,
    tol: float = DEFAULT_TOL,
) -> SlabFit:
    """Fit the thinnest slab to bisector samples at increasing radii.

    Radii are Euclidean distances from the midpoint of ``x`` and ``y``
    (default ``{1, 4, 16, 64} * ||x - y||_2``).  The width at radius ``r`` is
    the thinnest slab containing every sample found from anchors of radius
    at most ``r``.  The verdict is ``not_sandwiched`` when
    ``width(r_max) / max(width(r_min), flat_tol)`` exceeds ``growth_factor``.
    """
    n = b.norm
    dim = n.dim
    if samples_per_radius < dim + 1:
        raise ValueError(f"samples_per_radius must be at least {dim + 1}")
    if radii is None:
        radii = [k * float(np.linalg.norm(b.direction)) for k in (1.0, 4.0, 16.0, 64.0)]
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii) or any(r2 <= r1 for r1, r2 in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and increasing")

    streams = np.random.SeedSequence(seed).spawn(len(radii) + 1)
    grid = _direction_grid(dim, grid_size, np.random.default_rng(streams[-1]))
    blocks = []
    for r, ss in zip(radii, streams):
        rng = np.random.default_rng(ss)
        u = rng.standard_normal((samples_per_radius, dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        pts = sample_bisector(b, b.midpoint + r * u, tol)
        res = np.abs(b.h(pts))
        blocks.append(np.column_stack([np.full(len(pts), r), pts, res]))
    samples = np.vstack(blocks)

    widths = []
    normal = None
    for r in radii:
        Z = samples[samples[:, 0] <= r, 1:-1]
        normal, w = thinnest_slab(Z, grid)
        widths.append(w)
    proj = samples[:, 1:-1] @ normal
    lo, hi = float(proj.min()), float(proj.max())
    growth = widths[-1] / max(widths[0], flat_tol)
    verdict = "not_sandwiched" if growth > growth_factor else "sandwiched"
    return SlabFit(normal, lo, hi, 0.0, radii[-1], radii, widths, verdict, growth, samples)


# ---------------------------------------------------------------------------
# planar line bisectors and reflections


@dataclass(frozen=True)
class ReflectionReport:
    bisector_is_line: bool
    isometry_residual: Optional[float]
    line_direction: Optional[np.ndarray]
    line_deviation: float


def reflection_isometry_check(
    n: NormSpec,
    z,
    samples: int = 500,
    seed: int = 0,
    num_anchors: int = 41,
    line_tol: float = 1e-9,
) -> ReflectionReport:
    """Test whether ``B(-z, z)`` is a line and, if so, whether the reflection fixing it is an isometry.

    The reflection is the linear map sending ``z`` to ``-z`` and fixing the
    line direction.  The residual is ``max |‖phi(v)‖ - ‖v‖|`` over random
    unit vectors ``v``.
    """
    if n.dim != 2:
        raise DegenerateInput("reflection check is planar")
    z = as_vector(z, 2, "z")
    if not np.any(z):
        raise DegenerateInput("z must be nonzero")
    b = Bisector(n, -z, z)
    perp = np.array([-z[1], z[0]])
    s = np.linspace(-8.0, 8.0, num_anchors)
    tl, tr = line_roots(b, s[:, None] * perp)
    d = b.direction
    scale = np.linalg.norm(z) * 8.0
    if np.any((tr - tl) * np.linalg.norm(d) > line_tol * scale):
        return ReflectionReport(False, None, None, float(np.max((tr - tl) * np.linalg.norm(d)) / scale))
    P = s[:, None] * perp + (0.5 * (tl + tr))[:, None] * d
    p = np.linalg.svd(P, full_matrices=False)[2][0]
    off = np.array([-p[1], p[0]])
    deviation = float(np.max(np.abs(P @ off)) / np.max(np.linalg.norm(P, axis=1)))
    if deviation > line_tol:
        return ReflectionReport(False, None, None, deviation)
    phi = np.column_stack([p, -z]) @ np.linalg.inv(np.column_stack([p, z]))
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((samples, 2))
    v /= n.evaluate(v)[:, None]
    residual = float(np.max(np.abs(n.evaluate(v @ phi.T) - 1.0)))
    return ReflectionReport(True, residual, canonical_sign(p), deviation)
