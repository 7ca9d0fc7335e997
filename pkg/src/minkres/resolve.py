"""Anchor simplices, multilateration inside their hull, and resolving-set checks.

A set of ``d + 1`` affinely independent anchors *resolves* its convex hull
when the distance vector ``(||x - p_j||)_j`` determines every hull point
``x``.  This module recovers points from distance vectors, searches for
violating pairs, and synthesises explicit counterexample certificates:

* a planar construction from a flat segment ``[a, b]`` of the unit sphere,
  with anchors ``-(a+b)/2, (1+s)a + b, a + (1+s)b`` on the bisector of
  ``a`` and ``b``;
* a three-dimensional construction for strictly convex norms that are not
  quadratic, driven by the nonlinearity of the *region graph* ``f``;
* a lift that appends anchors on the bisector to reach any higher dimension.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from .bisector import Bisector, line_intersect
from .errors import (
    DegenerateAnchors,
    DimensionMismatch,
    InvalidNorm,
    MinkresError,
    NormIsEuclidean,
    NormIsStrictlyConvex,
    NoSignPattern,
    NoSolution,
    NotStrictlyConvex,
)
from .norms import (
    DEFAULT_TOL,
    NormSpec,
    as_vector,
    find_flat_segment,
    first_flat_segment,
    planar_face,
    restrict,
)

HULL_TOL = 1e-10
SEPARATION_FLOOR = 1e-6
WITNESS_RESIDUAL = 1e-8
CERT_RESIDUAL = 1e-8

_EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# anchors and distances


@dataclass(frozen=True, eq=False)
class AnchorSet:
    points: np.ndarray

    def __post_init__(self):
        P = np.array(self.points, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] + 1:
            raise DimensionMismatch(f"need d+1 anchors in R^d, got array of shape {P.shape}")
        if P.shape[1] < 2:
            raise DimensionMismatch("anchors must live in dimension >= 2")
        if not np.all(np.isfinite(P)):
            raise DegenerateAnchors("anchors have non-finite coordinates")
        s = np.linalg.svd(P[1:] - P[0], compute_uv=False)
        if s[-1] <= 1e-10 * max(_diameter(P), 1e-300):
            raise DegenerateAnchors("anchors are not affinely independent")
        P.setflags(write=False)
        object.__setattr__(self, "points", P)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def scale(self) -> float:
        return _diameter(self.points)


def _diameter(P: np.ndarray) -> float:
    return float(np.max(np.linalg.norm(P[:, None, :] - P[None, :, :], axis=-1)))


@dataclass(frozen=True, eq=False)
class DistanceVector:
    values: np.ndarray

    def __post_init__(self):
        r = np.array(self.values, dtype=float)
        if r.ndim != 1:
            raise DimensionMismatch("distances must be a flat list")
        if not np.all(np.isfinite(r)) or np.any(r < 0):
            raise ValueError("distances must be finite and nonnegative")
        r.setflags(write=False)
        object.__setattr__(self, "values", r)


def _check_norm(a: AnchorSet, n: NormSpec):
    if a.dim != n.dim:
        raise DimensionMismatch(f"anchors live in R^{a.dim}, norm in R^{n.dim}")


def distances_from(a: AnchorSet, n: NormSpec, x) -> DistanceVector:
    _check_norm(a, n)
    x = as_vector(x, n.dim, "x")
    return DistanceVector(n.evaluate(x - a.points))


def barycentric(P: np.ndarray, x) -> np.ndarray:
    """Raw barycentric coordinates of ``x`` (rows ``x``) with respect to the simplex ``P``."""
    P = np.asarray(P, dtype=float)
    M = np.vstack([P.T, np.ones(len(P))])
    X = np.atleast_2d(np.asarray(x, dtype=float))
    rhs = np.vstack([X.T, np.ones(len(X))])
    lam = np.linalg.solve(M, rhs).T
    return lam if np.ndim(x) > 1 else lam[0]


def hull_membership(a: AnchorSet, x, tol: float = HULL_TOL) -> Optional[np.ndarray]:
    """Barycentric coordinates of ``x`` clamped to ``[0, 1]``, or ``None`` outside the hull."""
    x = as_vector(x, a.dim, "x")
    lam = barycentric(a.points, x)
    if lam.min() < -tol:
        return None
    return np.clip(lam, 0.0, 1.0)


# ---------------------------------------------------------------------------
# multilateration


@functools.lru_cache(maxsize=32)
def _simplex_grid(d: int, g: int) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric lattice with ``g`` steps per edge and its neighbour table."""
    comps = [c for c in itertools.product(range(g + 1), repeat=d) if sum(c) <= g]
    comps = [(g - sum(c),) + c for c in comps]
    index = {c: i for i, c in enumerate(comps)}
    nbrs = []
    for c in comps:
        row = []
        for i, j in itertools.permutations(range(d + 1), 2):
            if c[i] > 0:
                nb = list(c)
                nb[i] -= 1
                nb[j] += 1
                row.append(index[tuple(nb)])
        nbrs.append(row)
    width = max(len(r) for r in nbrs)
    table = np.array([r + [r[0]] * (width - len(r)) for r in nbrs])
    return np.array(comps, dtype=float) / g, table


def _safe_gradient(n: NormSpec, D: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        G = n.gradient(D)
    zero = ~np.any(D != 0, axis=-1)
    G = np.where(zero[..., None], 0.0, G)
    return np.nan_to_num(G, nan=0.0, posinf=0.0, neginf=0.0)


def _residuals(n: NormSpec, P: np.ndarray, r: np.ndarray, X: np.ndarray) -> np.ndarray:
    return n.evaluate(X[..., None, :] - P) - r


def _max_residual(n, P, r, X) -> np.ndarray:
    return np.abs(_residuals(n, P, r, X)).max(axis=-1)


def _levenberg_marquardt(n, P, r, X0, iterations: int = 100) -> np.ndarray:
    """Batched damped Gauss-Newton on the residual vector, one problem per row of ``X0``."""
    X = np.array(X0, dtype=float)
    k, d = X.shape
    mu = np.full(k, 1e-3)
    R = _residuals(n, P, r, X)
    cost = np.sum(R * R, axis=1)
    eye = np.eye(d)
    for _ in range(iterations):
        J = _safe_gradient(n, X[:, None, :] - P)
        JTJ = np.einsum("kmi,kmj->kij", J, J)
        g = np.einsum("kmi,km->ki", J, R)
        A = JTJ + mu[:, None, None] * eye
        step = -np.linalg.solve(A, g[..., None])[..., 0]
        Xn = X + step
        Rn = _residuals(n, P, r, Xn)
        cn = np.sum(Rn * Rn, axis=1)
        better = cn < cost
        X = np.where(better[:, None], Xn, X)
        R = np.where(better[:, None], Rn, R)
        cost = np.where(better, cn, cost)
        mu = np.where(better, mu / 3.0, np.minimum(mu * 4.0, 1e12))
        if np.all((cost <= 1e-30) | (np.linalg.norm(step, axis=1) <= 1e-16 * (1 + np.linalg.norm(X, axis=1)))):
            break
    return X


def _compass(n, P, r, x, scale: float, min_step: float = 1e-15) -> np.ndarray:
    """Derivative-free descent on the max-residual; used when Gauss-Newton stalls on kinks."""
    d = len(x)
    dirs = np.vstack([np.eye(d), -np.eye(d)])
    best = float(_max_residual(n, P, r, x))
    step = 0.1 * scale
    while step > min_step * scale:
        trial = x + step * dirs
        vals = _max_residual(n, P, r, trial)
        k = int(np.argmin(vals))
        if vals[k] < best:
            x, best = trial[k], float(vals[k])
        else:
            step *= 0.5
    return x


def _linearized_solution(a: AnchorSet, n: NormSpec, r: np.ndarray) -> np.ndarray:
    """Unique point with the given quadratic-norm distances, from differences of squares."""
    Q = np.eye(n.dim) if n.kind == "euclidean" or (n.kind == "p_norm") else n.Q
    P = a.points
    q = np.einsum("ji,ik,jk->j", P, Q, P)
    A = 2.0 * (P[1:] - P[0]) @ Q
    rhs = q[1:] - q[0] - r[1:] ** 2 + r[0] ** 2
    return np.linalg.solve(A, rhs)


def multilaterate(
    a: AnchorSet,
    n: NormSpec,
    r: Union[DistanceVector, Sequence[float]],
    grid: int = 10,
    tol: float = DEFAULT_TOL,
    max_seeds: int = 24,
) -> list[np.ndarray]:
    """All hull points whose distances to the anchors match ``r`` within ``tol``.

    Seeds are the local minima of the max-residual on a barycentric lattice;
    each is polished by Gauss-Newton with a compass-search fallback.
    Solutions closer than ``10 * tol`` are merged.  When the solution set is
    a segment (possible for norms that are not strictly convex) its two
    endpoints are reported.  Raises :class:`NoSolution` with the best
    residual found when nothing matches.
    """
    _check_norm(a, n)
    if not isinstance(r, DistanceVector):
        r = DistanceVector(r)
    rv = r.values
    if len(rv) != a.dim + 1:
        raise DimensionMismatch(f"need {a.dim + 1} distances, got {len(rv)}")
    P = a.points
    scale = a.scale
    if np.sum(rv == 0) > 1:
        raise NoSolution("two zero distances to distinct anchors are infeasible")
    if np.any(rv > n.evaluate(P[:, None, :] - P[None, :, :]).max() * (1 + 1e-9) + tol):
        raise NoSolution("a distance exceeds the largest anchor separation")
    ftol = tol * max(1.0, float(rv.max()))

    lam, nbrs = _simplex_grid(a.dim, grid)
    G = lam @ P
    F = _max_residual(n, P, rv, G)
    local = np.flatnonzero(F <= F[nbrs].min(axis=1))
    order = local[np.argsort(F[local], kind="stable")][:max_seeds]
    extra = np.argsort(F, kind="stable")[:4]
    seeds = G[np.unique(np.concatenate([order, extra]))]

    X = _levenberg_marquardt(n, P, rv, seeds)
    FX = _max_residual(n, P, rv, X)
    for i in np.flatnonzero(FX > ftol):
        x = _compass(n, P, rv, X[i], scale)
        x = _levenberg_marquardt(n, P, rv, x[None, :])[0]
        X[i], FX[i] = x, _max_residual(n, P, rv, x)

    inside = np.array([barycentric(P, x).min() >= -1e-9 for x in X])
    ok = (FX <= ftol) & inside
    if not ok.any():
        cand = FX[inside] if inside.any() else FX
        raise NoSolution("no hull point matches the distances", float(cand.min()))
    sols = X[ok][np.argsort(FX[ok], kind="stable")]

    def solution(x) -> bool:
        return bool(_max_residual(n, P, rv, x) <= ftol) and barycentric(P, x).min() >= -1e-9

    if n.is_quadratic:
        x_lin = _linearized_solution(a, n, rv)
        if np.any(np.linalg.norm(sols - x_lin, axis=1) > 1e-6 * max(1.0, scale)):
            raise MinkresError("iterative and linearized multilateration disagree")
        return [x_lin] if solution(x_lin) else [sols[0]]

    return _components(n, P, rv, sols, solution, tol, scale)


def _components(n, P, rv, sols, solution, tol, scale) -> list[np.ndarray]:
    merge = 10.0 * tol * max(1.0, scale)
    reps: list[np.ndarray] = []
    for x in sols:
        if all(np.linalg.norm(x - y) > merge for y in reps):
            reps.append(x)

    # link representatives joined by a segment of solutions
    parent = list(range(len(reps)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(range(len(reps)), 2):
        ts = np.linspace(0.0, 1.0, 11)[1:-1]
        seg = reps[i][None, :] + ts[:, None] * (reps[j] - reps[i])
        if np.all(_max_residual(n, P, rv, seg) <= 10 * _EPS * max(1.0, rv.max()) + 1e-12 * scale):
            parent[find(i)] = find(j)
    groups: dict[int, list[np.ndarray]] = {}
    for i, x in enumerate(reps):
        groups.setdefault(find(i), []).append(x)

    strict = min(tol, 1e-12) * max(1.0, float(rv.max()))

    def on_set(x) -> bool:
        return bool(_max_residual(n, P, rv, x) <= strict) and barycentric(P, x).min() >= -1e-12

    out: list[np.ndarray] = []
    h = 1e-3 * scale
    for members in groups.values():
        M = np.array(members)
        x0 = M[0]
        dirs = []
        if len(M) > 1:
            dirs.append(np.linalg.svd(M - M.mean(axis=0))[2][0])
        J = _safe_gradient(n, x0 - P)
        _, s, Vt = np.linalg.svd(J)
        dirs.extend(Vt[np.flatnonzero(s <= 1e-8 * max(s.max(), 1e-300))])
        dirs.extend(np.eye(n.dim))
        ends = None
        for u in dirs:
            if on_set(x0 + h * u) or on_set(x0 - h * u):
                lo = _extent(on_set, x0, -u, scale)
                hi = _extent(on_set, x0, u, scale)
                ends = [x0 - lo * u, x0 + hi * u]
                break
        out.extend(ends if ends is not None else [x0])
    out = sorted(out, key=lambda v: tuple(np.round(v, 9)))
    dedup: list[np.ndarray] = []
    for x in out:
        if all(np.linalg.norm(x - y) > merge for y in dedup):
            dedup.append(x)
    return dedup


def _extent(ok, x, u, scale) -> float:
    """Largest ``t`` with ``ok(x + t u)``, assuming the admissible ``t`` form an interval."""
    lo, hi = 0.0, 1e-3 * scale
    while ok(x + hi * u):
        lo, hi = hi, 2.0 * hi
        if hi > 4.0 * scale:
            return lo
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if ok(x + mid * u):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * _EPS * scale:
            break
    return lo


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True, eq=False)
class CounterexampleCertificate:
    """Two distinct hull points ``x, y`` and anchors all lying on ``B(x, y)``."""

    x: np.ndarray
    y: np.ndarray
    anchors: np.ndarray
    equidistance_residual: float
    hull_margin: float
    norm: NormSpec

    @property
    def dim(self) -> int:
        return len(self.x)

    @property
    def anchor_set(self) -> AnchorSet:
        return AnchorSet(self.anchors)

    def to_dict(self) -> dict:
        return {
            "x": [float(v) for v in self.x],
            "y": [float(v) for v in self.y],
            "anchors": [[float(v) for v in p] for p in self.anchors],
            "equidistance_residual": float(self.equidistance_residual),
            "hull_margin": float(self.hull_margin),
            "norm": self.norm.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CounterexampleCertificate":
        return cls(
            np.array(data["x"], dtype=float),
            np.array(data["y"], dtype=float),
            np.array(data["anchors"], dtype=float),
            float(data["equidistance_residual"]),
            float(data["hull_margin"]),
            NormSpec.from_dict(data["norm"]),
        )


def make_certificate(n: NormSpec, x, y, anchors) -> CounterexampleCertificate:
    x = as_vector(x, n.dim, "x")
    y = as_vector(y, n.dim, "y")
    P = np.array(anchors, dtype=float) + 0.0
    res = float(np.max(np.abs(n.difference(P - x, P - y))))
    try:
        lam = barycentric(P, np.array([x, y]))
        margin = float(lam.min())
    except np.linalg.LinAlgError:
        margin = -math.inf
    return CounterexampleCertificate(x, y, P, res, margin, n)


@dataclass
class VerificationReport:
    passed: bool
    sigma_min: float
    residuals: np.ndarray
    barycentric_x: Optional[np.ndarray]
    barycentric_y: Optional[np.ndarray]
    separation: float
    failures: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        def lst(v):
            return None if v is None else [float(t) for t in v]

        return {
            "passed": self.passed,
            "sigma_min": float(self.sigma_min),
            "residuals": lst(self.residuals),
            "barycentric_x": lst(self.barycentric_x),
            "barycentric_y": lst(self.barycentric_y),
            "separation": float(self.separation),
            "failures": list(self.failures),
        }


def verify_certificate(cert: CounterexampleCertificate, n: Optional[NormSpec] = None) -> VerificationReport:
    """Recompute every certificate invariant from scratch; failures are listed, never raised."""
    n = cert.norm if n is None else n
    failures = []
    P = np.asarray(cert.anchors, dtype=float)
    x = np.asarray(cert.x, dtype=float)
    y = np.asarray(cert.y, dtype=float)
    d = n.dim
    if P.shape != (d + 1, d) or x.shape != (d,) or y.shape != (d,):
        return VerificationReport(False, 0.0, np.array([]), None, None, 0.0, ["shape mismatch"])
    scale = max(_diameter(P), 1e-300)
    sigma = float(np.linalg.svd(P[1:] - P[0], compute_uv=False)[-1])
    if sigma <= 1e-10 * scale:
        failures.append(f"anchors not affinely independent (sigma_min={sigma:.3g})")
    res = np.abs(n.difference(P - x, P - y))
    if res.max() > CERT_RESIDUAL * max(1.0, float(n.evaluate(P - x).max())):
        failures.append(f"equidistance residual {res.max():.3g}")
    sep = float(np.linalg.norm(x - y))
    if sep <= SEPARATION_FLOOR:
        failures.append("x and y coincide")
    lx = ly = None
    if sigma > 1e-10 * scale:
        lx, ly = barycentric(P, x), barycentric(P, y)
        if lx.min() < -HULL_TOL:
            failures.append(f"x outside the hull (min coordinate {lx.min():.3g})")
        if ly.min() < -HULL_TOL:
            failures.append(f"y outside the hull (min coordinate {ly.min():.3g})")
    return VerificationReport(not failures, sigma, res, lx, ly, sep, failures)


# ---------------------------------------------------------------------------
# planar construction from a flat segment


def srs2_from_segment(n: NormSpec, a, b, s: float) -> CounterexampleCertificate:
    """Certificate ``x = a, y = b`` with anchors ``-(a+b)/2, (1+s)a + b, a + (1+s)b``."""
    if n.dim != 2:
        raise DimensionMismatch("the planar construction needs a planar norm")
    if not s > 0:
        raise ValueError("s must be positive")
    a = as_vector(a, 2, "a")
    b = as_vector(b, 2, "b")
    anchors = np.array([-0.5 * (a + b), (1 + s) * a + b, a + (1 + s) * b])
    return make_certificate(n, a, b, anchors)


def srs2_counterexample(
    n: NormSpec, s: Union[float, str] = "auto", tol: float = DEFAULT_TOL, max_doublings: int = 40
) -> CounterexampleCertificate:
    """Planar certificate built on the first flat segment of the unit circle.

    With ``s="auto"`` the parameter doubles from 1 until both ``a`` and ``b``
    sit inside the anchor triangle with barycentric margin above 1e-6.
    """
    if n.dim != 2:
        raise DimensionMismatch("srs2_counterexample needs a planar norm; see counterexample() for higher dimensions")
    seg = first_flat_segment(n, np.eye(2), tol)
    if seg is None:
        raise NormIsStrictlyConvex(f"{n.label} has no flat segment on its unit circle")
    if s != "auto":
        cert = srs2_from_segment(n, seg.a, seg.b, float(s))
    else:
        sv = 1.0
        for _ in range(max_doublings):
            cert = srs2_from_segment(n, seg.a, seg.b, sv)
            if cert.hull_margin > SEPARATION_FLOOR and verify_certificate(cert).passed:
                break
            sv *= 2.0
    rep = verify_certificate(cert)
    if not rep.passed:
        raise MinkresError("planar certificate failed verification: " + "; ".join(rep.failures))
    return cert


# ---------------------------------------------------------------------------
# region graphs


@dataclass(frozen=True, eq=False)
class RegionGraph:
    """Samples of ``f`` on the unit circle of ``M = z^perp``.

    ``plane_basis`` holds an orthonormal basis ``(m1, m2)`` of ``M`` and
    ``axis_direction`` the axis ``z`` scaled to unit norm.  For the plane
    ``P`` spanned by ``z`` and ``m(theta) = cos(theta) m1 + sin(theta) m2``,
    the bounding line of ``B(0, z) ∩ P`` through the origin is spanned by
    ``m(theta) + f(theta) z``.
    """

    norm: NormSpec
    plane_basis: np.ndarray
    axis_direction: np.ndarray
    samples: np.ndarray

    def f(self, theta) -> np.ndarray:
        return region_f(self.norm, self.axis_direction, self.plane_basis, theta)

    def f_vector(self, u2) -> float:
        """``f`` extended homogeneously to a vector of ``M`` given in ``(m1, m2)`` coordinates."""
        u2 = np.asarray(u2, dtype=float)
        rho = float(np.hypot(u2[0], u2[1]))
        return rho * float(self.f(math.atan2(u2[1], u2[0]))[0])


def region_f(n: NormSpec, z: np.ndarray, basis: np.ndarray, theta) -> np.ndarray:
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    zh = z / np.linalg.norm(z)
    zl = np.linalg.norm(z)
    out = np.empty(len(theta))
    for i, th in enumerate(theta):
        m = math.cos(th) * basis[:, 0] + math.sin(th) * basis[:, 1]
        E = np.column_stack([zh, m])
        p = planar_face(n, E, np.array([0.0, 1.0]))[0]
        beta, alpha = E.T @ p
        out[i] = beta / (alpha * zl)
    return out


def _orthonormal_complement(z: np.ndarray) -> np.ndarray:
    return np.linalg.svd(z[None, :])[2][1:].T


def region_graph(n: NormSpec, z, num_angles: int = 64, basis=None) -> RegionGraph:
    if n.dim != 3:
        raise DimensionMismatch("region graphs are defined for three-dimensional norms")
    if not n.is_strictly_convex:
        raise NotStrictlyConvex(f"{n.label} is not strictly convex")
    z = as_vector(z, 3, "z")
    if not np.any(z):
        raise ValueError("z must be nonzero")
    if num_angles < 4 or num_angles % 2:
        raise ValueError("num_angles must be an even number >= 4")
    z = z / float(n.evaluate(z))
    B = _orthonormal_complement(z) if basis is None else np.asarray(basis, dtype=float)
    theta = 2.0 * math.pi * np.arange(num_angles) / num_angles
    vals = region_f(n, z, B, theta)
    return RegionGraph(n, B, z, np.column_stack([theta, vals]))


@dataclass(frozen=True)
class SignPattern:
    """Adapted coordinates on a tilted ``M`` and the two points of opposite sign.

    Ambient vectors ``e_x, e_y`` span ``M``; ``u1 = x1 e_x + y1 e_y`` has
    graph value ``alpha1 > 0`` and ``u2`` has ``-alpha2 < 0`` with respect to
    the axis ``z`` (already sign-adjusted), and ``0 < x1 < x2``,
    ``0 < y2 < y1``.  The graph vanishes at ``-e_x`` and ``-e_y``.
    """

    e_x: np.ndarray
    e_y: np.ndarray
    z: np.ndarray
    x1y1: tuple[float, float]
    x2y2: tuple[float, float]
    alpha1: float
    alpha2: float

    @property
    def u1(self) -> np.ndarray:
        return self.x1y1[0] * self.e_x + self.x1y1[1] * self.e_y

    @property
    def u2(self) -> np.ndarray:
        return self.x2y2[0] * self.e_x + self.x2y2[1] * self.e_y


@dataclass(frozen=True)
class LinearityReport:
    linear: bool
    residual: float
    coefficients: tuple[float, float]
    sign_pattern: Optional[SignPattern]


def graph_linearity_test(g: RegionGraph, tol: float = 1e-8, scan: int = 256) -> LinearityReport:
    """Least-squares fit of ``f`` by a linear function on ``M``; a sign pattern when it fails.

    The fitted linear part is absorbed by tilting ``M`` (graphs over a tilted
    plane differ by exactly a linear function), which makes at least three
    zeros of the remainder on every half-turn available for the axes.
    """
    th, fv = g.samples[:, 0], g.samples[:, 1]
    if len(th) < 16:
        raise ValueError("need at least 16 samples")
    A = np.column_stack([np.cos(th), np.sin(th)])
    coef, *_ = np.linalg.lstsq(A, fv, rcond=None)
    resid = fv - A @ coef
    residual = float(np.max(np.abs(resid)))
    if residual <= tol:
        return LinearityReport(True, residual, (float(coef[0]), float(coef[1])), None)
    pattern = _sign_pattern(g, coef, scan)
    return LinearityReport(False, residual, (float(coef[0]), float(coef[1])), pattern)


def _sign_pattern(g: RegionGraph, coef: np.ndarray, scan: int) -> SignPattern:
    B = g.plane_basis
    z = g.axis_direction

    def rem(theta: float) -> float:
        return float(g.f(theta)[0]) - coef[0] * math.cos(theta) - coef[1] * math.sin(theta)

    def rem_vec(u2) -> float:
        return g.f_vector(u2) - float(coef @ u2)

    th = g.samples[:, 0]
    vals = g.samples[:, 1] - coef[0] * np.cos(th) - coef[1] * np.sin(th)
    half = len(th) // 2
    grid = np.append(th[: half + 1], math.pi) if th[half] != math.pi else th[: half + 1]
    gv = np.append(vals[: half + 1], -vals[0]) if th[half] != math.pi else vals[: half + 1]
    floor = 1e-13 * max(1.0, np.abs(vals).max())
    zeros = []
    for i in range(len(grid) - 1):
        if abs(gv[i]) <= floor:
            zeros.append(float(grid[i]))
        elif gv[i] * gv[i + 1] < 0 and abs(gv[i + 1]) > floor:
            zeros.append(brentq(rem, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15))
    zeros = sorted(set(round(t, 14) for t in zeros if t < math.pi - 1e-12))
    if len(zeros) < 3:
        raise NoSignPattern(f"remainder has only {len(zeros)} zeros on a half-turn")
    ext = zeros + [t + math.pi for t in zeros]
    m = lambda t: np.array([math.cos(t), math.sin(t)])  # noqa: E731
    psi = (np.arange(scan) + 0.5) * (0.5 * math.pi / scan)
    for i in range(len(zeros)):
        t1, t3 = ext[i], ext[i + 2]
        if t3 - t1 >= math.pi - 1e-9:
            continue
        ex2, ey2 = -m(t1), -m(t3)
        gvals = np.array([rem_vec(math.cos(p) * ex2 + math.sin(p) * ey2) for p in psi])
        k_pos, k_neg = int(np.argmax(gvals)), int(np.argmin(gvals))
        if not (gvals[k_pos] > 0 > gvals[k_neg]):
            continue
        sign = 1.0 if psi[k_pos] > psi[k_neg] else -1.0
        k1, k2 = (k_pos, k_neg) if sign > 0 else (k_neg, k_pos)
        p1, p2 = psi[k1], psi[k2]
        rho = math.sqrt((math.sin(p2) / math.sin(p1)) * (math.cos(p2) / math.cos(p1)))
        x1y1 = (rho * math.cos(p1), rho * math.sin(p1))
        x2y2 = (math.cos(p2), math.sin(p2))
        alpha1 = sign * rho * gvals[k1]
        alpha2 = -sign * gvals[k2]

        def lift(v2):
            return B @ v2 + float(coef @ v2) * z

        return SignPattern(lift(ex2), lift(ey2), sign * z, x1y1, x2y2, float(alpha1), float(alpha2))
    raise NoSignPattern("no quadrant with a sign change was found")


# ---------------------------------------------------------------------------
# three-dimensional construction


@dataclass(frozen=True)
class Srs3Trace:
    """Intermediate quantities of the three-dimensional construction."""

    t: float
    q: np.ndarray
    theta: np.ndarray
    weights: np.ndarray
    mu: float
    nu: float


def _srs3_from_pattern(n: NormSpec, sp: SignPattern, max_doublings: int) -> tuple[CounterexampleCertificate, Srs3Trace]:
    z = sp.z
    q = np.array([sp.u1 + sp.alpha1 * z, sp.u2 - sp.alpha2 * z, -sp.e_x, -sp.e_y])
    w1 = (1 / sp.alpha1) / (1 / sp.alpha1 + 1 / sp.alpha2)
    w2 = 1.0 - w1
    xt = w1 * sp.x1y1[0] + w2 * sp.x2y2[0]
    yt = w1 * sp.x1y1[1] + w2 * sp.x2y2[1]
    S = xt + yt
    mu, nu = S / (1 + S), xt / S
    weights = np.array([(1 - mu) * w1, (1 - mu) * w2, mu * nu, mu * (1 - nu)])
    b = Bisector(n, np.zeros(3), z)
    t = 1.0
    for _ in range(max_doublings):
        lam = barycentric(q, np.array([z / t, -z / t]))
        if lam.min() > 1e-3:
            theta = np.empty(4)
            P = np.empty((4, 3))
            for j in range(4):
                pts = line_intersect(b, t * q[j])
                P[j] = pts[0] if len(pts) == 1 else 0.5 * (pts[0] + pts[1])
                theta[j] = float(np.dot(P[j] - t * q[j], z) / np.dot(z, z))
            if not np.all((theta > 1e-12) & (theta < 1 - 1e-12)):
                raise MinkresError(f"lifted heights left (0, 1): {theta}")
            cert = make_certificate(n, np.zeros(3), z, P)
            if cert.hull_margin > 0 and verify_certificate(cert).passed:
                return cert, Srs3Trace(t, q, theta, weights, mu, nu)
        t *= 2.0
    raise NoSignPattern("hull containment was not reached within the doubling budget")


def _default_axes(seed: int, count: int) -> list[np.ndarray]:
    fixed = [(1, 1, 1), (1, 2, 3), (1, -1, 2), (0, 1, 2), (2, 1, 0), (1, 0, 0), (0, 0, 1)]
    axes = [np.array(v, dtype=float) for v in fixed]
    rng = np.random.default_rng(seed)
    while len(axes) < count:
        axes.append(rng.standard_normal(3))
    return axes[:count]


def srs3_counterexample(
    n: NormSpec,
    axes: Optional[Sequence] = None,
    seed: int = 0,
    num_angles: int = 64,
    max_axes: int = 12,
    max_doublings: int = 40,
    return_trace: bool = False,
):
    """Three-dimensional certificate for a strictly convex, non-quadratic norm.

    Probes axis directions ``z`` until the region graph is nonlinear with a
    usable sign pattern, then lifts four graph points onto ``B(0, z)``.
    Raises :class:`NormIsEuclidean` when every probed graph is linear.
    """
    if n.dim != 3:
        raise DimensionMismatch("srs3_counterexample needs a three-dimensional norm")
    if not n.is_strictly_convex:
        raise NotStrictlyConvex(f"{n.label} is not strictly convex; use the planar construction")
    candidates = list(axes) if axes is not None else _default_axes(seed, max_axes)
    failure: Optional[NoSignPattern] = None
    for z in candidates:
        g = region_graph(n, z, num_angles)
        try:
            rep = graph_linearity_test(g)
        except NoSignPattern as exc:
            failure = exc
            continue
        if rep.linear:
            continue
        try:
            cert, trace = _srs3_from_pattern(n, rep.sign_pattern, max_doublings)
        except NoSignPattern as exc:
            failure = exc
            continue
        return (cert, trace) if return_trace else cert
    if failure is not None:
        raise NoSignPattern(f"no usable sign pattern over {len(candidates)} axes: {failure}")
    raise NormIsEuclidean(f"every probed region graph of {n.label} is linear")


# ---------------------------------------------------------------------------
# lifting to higher dimensions


def _restriction_matches(n: NormSpec, sub: NormSpec, E: np.ndarray, seed: int) -> bool:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((64, sub.dim))
    a, b = n.evaluate(v @ E.T), sub.evaluate(v)
    return bool(np.all(np.abs(a - b) <= 1e-9 * np.maximum(1.0, b)))


def lift_to_dimension(
    cert: CounterexampleCertificate,
    n: NormSpec,
    basis=None,
    seed: int = 0,
    max_retries: int = 20,
) -> CounterexampleCertificate:
    """Embed a certificate into ``n``'s space and append anchors on ``B(x, y)``.

    ``basis`` is a ``(D, k)`` matrix with orthonormal columns (default: the
    first ``k`` coordinate axes).  Each new anchor starts off the current
    affine hull and slides along ``y - x`` onto the bisector, which keeps it
    off the hull.  The new anchors carry zero barycentric weight for ``x``
    and ``y``, so the lifted hull margin is 0.
    """
    k, D = cert.dim, n.dim
    if D < k:
        raise DimensionMismatch("cannot lift to a lower dimension")
    E = np.eye(D)[:, :k] if basis is None else np.asarray(basis, dtype=float)
    if E.shape != (D, k) or not np.allclose(E.T @ E, np.eye(k), atol=1e-12):
        raise DimensionMismatch(f"basis must be a ({D}, {k}) matrix with orthonormal columns")
    if not _restriction_matches(n, cert.norm, E, seed):
        raise InvalidNorm("the ambient norm does not restrict to the certificate's norm")
    if D == k and np.allclose(E, np.eye(D)):
        return cert
    x, y = E @ cert.x, E @ cert.y
    anchors = [E @ p for p in cert.anchors]
    b = Bisector(n, x, y)
    rng = np.random.default_rng(seed)
    scale = _diameter(np.array(anchors))
    for _ in range(D - k):
        P = np.array(anchors)
        span = np.linalg.svd(P[1:] - P[0])[2][: len(P) - 1]
        comp = np.linalg.svd(span)[2][len(span):]
        for _attempt in range(max_retries):
            o = rng.standard_normal(len(comp)) @ comp
            o *= scale / np.linalg.norm(o)
            start = P.mean(axis=0) + o
            pts = line_intersect(b, start)
            cand = pts[0] if len(pts) == 1 else 0.5 * (pts[0] + pts[1])
            trial = np.vstack([P, cand])
            s = np.linalg.svd(trial[1:] - trial[0], compute_uv=False)
            if s[-1] > 1e-8 * _diameter(trial):
                anchors.append(cand)
                break
        else:
            raise DegenerateAnchors("could not find an affinely independent bisector point")
    out = make_certificate(n, x, y, np.array(anchors))
    rep = verify_certificate(out)
    if not rep.passed:
        raise MinkresError("lifted certificate failed verification: " + "; ".join(rep.failures))
    return out


def counterexample(n: NormSpec, seed: int = 0) -> CounterexampleCertificate:
    """Certificate that ``n`` fails the resolving property, dispatched on dimension and class."""
    if n.is_quadratic:
        raise NormIsEuclidean(f"{n.label} is an inner-product norm")
    if n.dim == 2:
        return srs2_counterexample(n)
    if not n.is_strictly_convex:
        seg, E = find_flat_segment(n)
        if seg is None:
            raise MinkresError(f"no flat segment found for {n.label}")
        cert = srs2_counterexample(restrict(n, E))
        return lift_to_dimension(cert, n, basis=E, seed=seed)
    E = np.eye(n.dim)[:, :3]
    cert = srs3_counterexample(restrict(n, E), seed=seed)
    return lift_to_dimension(cert, n, basis=E, seed=seed)


# ---------------------------------------------------------------------------
# resolving checks


@dataclass(frozen=True)
class ResolveBudget:
    probes: int = 8
    starts: int = 64
    maxiter: int = 400
    grid: int = 8


@dataclass(frozen=True)
class ResolutionReport:
    resolving: bool
    witness: Optional[tuple[np.ndarray, np.ndarray]]
    residual: float
    stage: str = "search"

    def to_dict(self) -> dict:
        return {
            "resolving": self.resolving,
            "witness": None if self.witness is None else [[float(v) for v in w] for w in self.witness],
            "residual": float(self.residual),
            "stage": self.stage,
        }


@functools.lru_cache(maxsize=16)
def _cached_certificate(norm_key: str) -> Optional[CounterexampleCertificate]:
    n = NormSpec.from_dict(json.loads(norm_key))
    try:
        if n.dim == 2:
            return srs2_counterexample(n)
        if n.dim == 3 and n.is_strictly_convex and not n.is_quadratic:
            return srs3_counterexample(n)
    except MinkresError:
        return None
    return None


def _match_certificate(a: AnchorSet, cert: CounterexampleCertificate):
    """Map the certificate's witness onto ``a`` if the anchor sets agree up to translation, scaling and order."""
    P, C = a.points, cert.anchors
    cp, cc = P.mean(axis=0), C.mean(axis=0)
    k = a.scale / _diameter(C)
    for sgn in (1.0, -1.0):
        mapped = cp + sgn * k * (C - cc)
        for perm in itertools.permutations(range(len(P))):
            if np.max(np.abs(mapped[list(perm)] - P)) <= 1e-9 * a.scale:
                x = cp + sgn * k * (cert.x - cc)
                y = cp + sgn * k * (cert.y - cc)
                return x, y
    return None


def _pair_residual(n, P, x, y) -> float:
    return float(np.max(np.abs(n.difference(P - x, P - y))))


def _witness_from_solutions(n, P, sols) -> Optional[tuple[np.ndarray, np.ndarray, float]]:
    for x, y in itertools.combinations(sols, 2):
        if np.linalg.norm(x - y) >= SEPARATION_FLOOR:
            res = _pair_residual(n, P, x, y)
            if res < WITNESS_RESIDUAL:
                return x, y, res
    return None


def is_resolving_for_hull(
    a: AnchorSet, n: NormSpec, budget: ResolveBudget = ResolveBudget(), seed: int = 0
) -> ResolutionReport:
    """Search for two distinct hull points with equal distances to every anchor.

    Stages: match against the synthesised certificate for ``n``; multilaterate
    the distance vectors of random probe points; minimise the pair objective
    from random starts.  ``resolving=True`` means no witness was found within
    the budget.
    """
    _check_norm(a, n)
    P = a.points
    d = a.dim
    cert = _cached_certificate(n.key())
    if cert is not None and cert.dim == d:
        hit = _match_certificate(a, cert)
        if hit is not None:
            x, y = hit
            res = _pair_residual(n, P, x, y)
            if res < WITNESS_RESIDUAL:
                return ResolutionReport(False, (x, y), res, "constructive")

    streams = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.default_rng(streams[0])
    probes = np.vstack([P.mean(axis=0), rng.dirichlet(np.ones(d + 1), budget.probes) @ P])
    for x in probes:
        try:
            sols = multilaterate(a, n, distances_from(a, n, x), grid=budget.grid)
        except NoSolution:
            continue
        w = _witness_from_solutions(n, P, sols)
        if w is not None:
            return ResolutionReport(False, (w[0], w[1]), w[2], "multilateration")

    rng = np.random.default_rng(streams[1])
    eps_pen = max(SEPARATION_FLOOR, 1e-3 * a.scale)
    k = budget.starts

    def split(Z):
        lx = np.exp(Z[:, : d + 1] - Z[:, : d + 1].max(axis=1, keepdims=True))
        ly = np.exp(Z[:, d + 1 :] - Z[:, d + 1 :].max(axis=1, keepdims=True))
        return (lx / lx.sum(1, keepdims=True)) @ P, (ly / ly.sum(1, keepdims=True)) @ P

    def objective(Z):
        X, Y = split(Z)
        gap = np.abs(n.difference(P - X[:, None, :], P - Y[:, None, :])).max(axis=1)
        return gap + 10.0 * np.maximum(0.0, eps_pen - np.linalg.norm(X - Y, axis=1))

    # Multi-start (1+1) evolution strategy with the one-fifth success rule;
    # the objective is non-smooth, so no gradients are used.
    Z = rng.normal(size=(k, 2 * (d + 1)))
    val = objective(Z)
    sigma = np.full(k, 0.5)
    for _ in range(budget.maxiter):
        trial = Z + sigma[:, None] * rng.normal(size=Z.shape)
        tv = objective(trial)
        win = tv < val
        Z = np.where(win[:, None], trial, Z)
        val = np.where(win, tv, val)
        sigma = np.clip(np.where(win, sigma * 1.5, sigma * 0.9), 1e-12, 2.0)
    best = float(val.min())
    X, _ = split(Z)
    for i in np.argsort(val, kind="stable"):
        if val[i] >= 1e-4 * a.scale:
            break
        try:
            sols = multilaterate(a, n, distances_from(a, n, X[i]), grid=budget.grid)
        except NoSolution:
            continue
        w = _witness_from_solutions(n, P, sols)
        if w is not None:
            return ResolutionReport(False, (w[0], w[1]), w[2], "pair-search")
    return ResolutionReport(True, None, best, "search")
