"""Symmetric norms on R^d and probes of their unit balls.

A norm is one of four closed kinds (euclidean, ellipsoidal, p-norm,
polyhedral).  Closed forms are used wherever they exist; polyhedral balls are
handled through their vertex and facet representations.

Vectors are plain float ``numpy`` arrays.  Most evaluators broadcast over
leading axes, so ``evaluate`` accepts an ``(..., d)`` array.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Optional

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import ConvexHull

from .errors import DegenerateInput, DimensionMismatch, InvalidNorm

DEFAULT_TOL = 1e-9

KINDS = ("euclidean", "ellipsoidal", "p_norm", "polyhedral")


def as_vector(v: Any, dim: Optional[int] = None, name: str = "vector") -> np.ndarray:
    """Coerce ``v`` to a finite 1-D float array, optionally of length ``dim``."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be one-dimensional, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatch(f"{name} has {arr.shape[0]} coordinates, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise DegenerateInput(f"{name} has non-finite entries")
    return arr


def canonical_sign(v: np.ndarray, rel: float = 1e-12) -> np.ndarray:
    """Flip ``v`` so its first significant coordinate is positive."""
    scale = np.max(np.abs(v))
    for c in v:
        if abs(c) > rel * scale:
            return v if c > 0 else -v
    return v


def _cross2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True, eq=False)
class NormSpec:
    """A symmetric norm on R^dim.

    ``p`` is used by ``p_norm`` (``math.inf`` allowed), ``Q`` by
    ``ellipsoidal`` (``||v|| = sqrt(v^T Q v)``) and ``vertices`` by
    ``polyhedral`` (the unit ball is their convex hull).
    """

    kind: str
    dim: int
    p: Optional[float] = None
    Q: Optional[np.ndarray] = None
    vertices: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidNorm(f"unknown norm kind {self.kind!r}")
        if int(self.dim) != self.dim or self.dim < 2:
            raise InvalidNorm(f"dim must be an integer >= 2, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        if self.kind == "p_norm":
            if self.p is None:
                raise InvalidNorm("p_norm needs p")
            p = float(self.p)
            if not (p >= 1.0):
                raise InvalidNorm(f"p must be >= 1, got {self.p}")
            object.__setattr__(self, "p", p)
        elif self.kind == "ellipsoidal":
            Q = np.array(self.Q, dtype=float)
            if Q.shape != (self.dim, self.dim) or not np.all(np.isfinite(Q)):
                raise InvalidNorm(f"Q must be a finite {self.dim}x{self.dim} matrix")
            if not np.allclose(Q, Q.T, rtol=0, atol=1e-12 * max(1.0, np.abs(Q).max())):
                raise InvalidNorm("Q must be symmetric")
            Q = 0.5 * (Q + Q.T)
            try:
                np.linalg.cholesky(Q)
            except np.linalg.LinAlgError:
                raise InvalidNorm("Q must be positive definite") from None
            Q.setflags(write=False)
            object.__setattr__(self, "Q", Q)
        elif self.kind == "polyhedral":
            V = np.array(self.vertices, dtype=float)
            if V.ndim != 2 or V.shape[1] != self.dim or not np.all(np.isfinite(V)):
                raise InvalidNorm(f"vertices must be a finite (k, {self.dim}) array")
            scale = np.abs(V).max()
            for v in V:
                if np.min(np.abs(V + v).max(axis=1)) > 1e-9 * scale:
                    raise InvalidNorm(f"vertex set is not centrally symmetric (no partner for {v})")
            if np.linalg.matrix_rank(V, tol=1e-10 * scale) < self.dim:
                raise InvalidNorm("vertices do not span the space")
            V.setflags(write=False)
            object.__setattr__(self, "vertices", V)

    # -- constructors -------------------------------------------------------

    @classmethod
    def euclidean(cls, dim: int) -> "NormSpec":
        return cls("euclidean", dim)

    @classmethod
    def ellipsoidal(cls, Q) -> "NormSpec":
        Q = np.asarray(Q, dtype=float)
        return cls("ellipsoidal", Q.shape[0], Q=Q)

    @classmethod
    def p_norm(cls, p: float, dim: int) -> "NormSpec":
        return cls("p_norm", dim, p=p)

    @classmethod
    def polyhedral(cls, vertices) -> "NormSpec":
        V = np.asarray(vertices, dtype=float)
        return cls("polyhedral", V.shape[1], vertices=V)

    # -- classification -----------------------------------------------------

    @property
    def is_smooth(self) -> bool:
        if self.kind == "p_norm":
            return 1.0 < self.p < math.inf
        return self.kind in ("euclidean", "ellipsoidal")

    @property
    def is_strictly_convex(self) -> bool:
        # Within the closed kind enumeration, smooth and strictly convex coincide.
        return self.is_smooth

    @property
    def is_quadratic(self) -> bool:
        return self.kind in ("euclidean", "ellipsoidal") or (self.kind == "p_norm" and self.p == 2.0)

    @property
    def label(self) -> str:
        if self.kind == "p_norm":
            return f"p_norm(p={_p_text(self.p)}, dim={self.dim})"
        return f"{self.kind}(dim={self.dim})"

    # -- polyhedral structure ----------------------------------------------

    @cached_property
    def extreme_points(self) -> np.ndarray:
        """Vertices of the unit ball (facet kinds only)."""
        d = self.dim
        if self.kind == "p_norm" and self.p == math.inf:
            return np.array(list(itertools.product((-1.0, 1.0), repeat=d)))
        if self.kind == "p_norm" and self.p == 1.0:
            eye = np.eye(d)
            return np.vstack([eye, -eye])
        if self.kind == "polyhedral":
            hull = ConvexHull(self.vertices)
            return self.vertices[np.sort(hull.vertices)]
        raise InvalidNorm(f"{self.label} has no vertex representation")

    @cached_property
    def facets(self) -> np.ndarray:
        """Rows ``a`` with unit ball ``{v : a.v <= 1}`` (facet kinds only)."""
        d = self.dim
        if self.kind == "p_norm" and self.p == math.inf:
            eye = np.eye(d)
            return np.vstack([eye, -eye])
        if self.kind == "p_norm" and self.p == 1.0:
            return np.array(list(itertools.product((-1.0, 1.0), repeat=d)))
        if self.kind == "polyhedral":
            eq = ConvexHull(self.vertices).equations
            rows = eq[:, :-1] / (-eq[:, -1:])
            rows = np.vstack([rows, -rows])
            _, keep = np.unique(np.round(rows, 10), axis=0, return_index=True)
            return rows[np.sort(keep)]
        raise InvalidNorm(f"{self.label} has no facet representation")

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, v) -> np.ndarray:
        """Norm of ``v`` along the last axis (no validation)."""
        v = np.asarray(v, dtype=float)
        if self.kind == "euclidean":
            return np.linalg.norm(v, axis=-1)
        if self.kind == "ellipsoidal":
            q = np.einsum("...i,ij,...j->...", v, self.Q, v)
            return np.sqrt(np.maximum(q, 0.0))
        if self.kind == "p_norm":
            a = np.abs(v)
            if self.p == math.inf:
                return a.max(axis=-1)
            if self.p == 1.0:
                return a.sum(axis=-1)
            m = a.max(axis=-1)
            safe = np.where(m > 0, m, 1.0)
            s = np.sum((a / safe[..., None]) ** self.p, axis=-1)
            return np.where(m > 0, m * s ** (1.0 / self.p), 0.0)
        return np.max(v @ self.facets.T, axis=-1)

    def difference(self, u, v) -> np.ndarray:
        """``||u|| - ||v||`` along the last axis without cancellation.

        Far from the origin the two norms agree to many digits and plain
        subtraction loses them; for smooth kinds the difference is formed
        from the coordinate-wise difference of the underlying sums instead.
        The sign is always exact relative to those sums.
        """
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.kind in ("euclidean", "ellipsoidal"):
            Q = np.eye(self.dim) if self.kind == "euclidean" else self.Q
            num = np.einsum("...i,ij,...j->...", u - v, Q, u + v)
            den = self.evaluate(u) + self.evaluate(v)
            safe = np.where(den > 0, den, 1.0)
            return np.where(den > 0, num / safe, 0.0)
        if self.kind == "p_norm" and math.isfinite(self.p) and self.p != 1.0:
            au, av = np.abs(u), np.abs(v)
            m = np.maximum(au.max(axis=-1), av.max(axis=-1))
            safe = np.where(m > 0, m, 1.0)[..., None]
            pu, pv = (au / safe) ** self.p, (av / safe) ** self.p
            sv = pv.sum(axis=-1)
            diff = np.sum(pu - pv, axis=-1)
            sv_safe = np.where(sv > 0, sv, 1.0)
            with np.errstate(divide="ignore"):
                    rel = np.expm1(np.log1p(diff / sv_safe) / self.p)
            out = np.where(sv > 0, safe[..., 0] * sv_safe ** (1.0 / self.p) * rel, self.evaluate(u))
            return np.where(m > 0, out, 0.0)
        return self.evaluate(u) - self.evaluate(v)

    def gradient(self, v) -> np.ndarray:
        """Gradient of the norm at ``v != 0`` (a subgradient for facet kinds)."""
        v = np.asarray(v, dtype=float)
        if self.kind == "euclidean":
            return v / np.linalg.norm(v, axis=-1, keepdims=True)
        if self.kind == "ellipsoidal":
            Qv = v @ self.Q
            return Qv / self.evaluate(v)[..., None]
        if self.kind == "p_norm":
            if self.p == 1.0:
                return np.sign(v)
            if self.p == math.inf:
                idx = np.argmax(np.abs(v), axis=-1)
                g = np.zeros_like(v)
                np.put_along_axis(g, idx[..., None], np.take_along_axis(np.sign(v), idx[..., None], -1), -1)
                return g
            n = self.evaluate(v)[..., None]
            return np.sign(v) * (np.abs(v) / n) ** (self.p - 1.0)
        rows = self.facets
        idx = np.argmax(v @ rows.T, axis=-1)
        return rows[idx]

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "dim": self.dim}
        if self.kind == "p_norm":
            out["p"] = "inf" if self.p == math.inf else self.p
        elif self.kind == "ellipsoidal":
            out["Q"] = self.Q.tolist()
        elif self.kind == "polyhedral":
            out["vertices"] = self.vertices.tolist()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "NormSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise InvalidNorm("norm description must be an object with a 'kind' field")
        kind = data["kind"]
        try:
            if kind == "euclidean":
                return cls(kind, data["dim"])
            if kind == "p_norm":
                p = data["p"]
                if isinstance(p, str):
                    if p.lower() not in ("inf", "infinity"):
                        raise InvalidNorm(f"bad p {p!r}")
                    p = math.inf
                return cls(kind, data["dim"], p=p)
            if kind == "ellipsoidal":
                Q = np.asarray(data["Q"], dtype=float)
                if "dim" in data and Q.shape[0] != data["dim"]:
                    raise InvalidNorm("Q does not match dim")
                return cls(kind, Q.shape[0], Q=Q)
            if kind == "polyhedral":
                V = np.asarray(data["vertices"], dtype=float)
                if V.ndim != 2 or ("dim" in data and V.shape[1] != data["dim"]):
                    raise InvalidNorm("vertices do not match dim")
                return cls(kind, V.shape[1], vertices=V)
        except KeyError as exc:
            raise InvalidNorm(f"missing field {exc.args[0]!r} for kind {kind!r}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidNorm):
                raise
            raise InvalidNorm(str(exc)) from None
        raise InvalidNorm(f"unknown norm kind {kind!r}")

    def key(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _p_text(p: float) -> str:
    return "inf" if p == math.inf else f"{p:g}"


def load_norm(path) -> NormSpec:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidNorm(f"{path}: not valid JSON ({exc})") from None
    return NormSpec.from_dict(data)


def _check_dim(n: NormSpec, *vectors) -> list[np.ndarray]:
    return [as_vector(v, n.dim) for v in vectors]


def eval_norm(n: NormSpec, v) -> float:
    (v,) = _check_dim(n, v)
    return float(n.evaluate(v))


def sphere_point(n: NormSpec, direction) -> np.ndarray:
    """Radial projection of ``direction`` onto the unit sphere."""
    (d,) = _check_dim(n, direction)
    r = n.evaluate(d)
    if r == 0:
        raise DegenerateInput("zero direction has no sphere point")
    return d / r


def parallelogram_defect(n: NormSpec, x, y) -> float:
    """``2(|x|^2 + |y|^2) - (|x+y|^2 + |x-y|^2)``; identically zero only for inner-product norms."""
    x, y = _check_dim(n, x, y)
    nx, ny, s, t = n.evaluate(np.array([x, y, x + y, x - y]))
    return float(2.0 * (nx * nx + ny * ny) - (s * s + t * t))


# ---------------------------------------------------------------------------
# support contacts


@dataclass(frozen=True)
class SupportContact:
    direction: np.ndarray
    point: np.ndarray
    is_exposed_uniquely: bool


def _lexmin(points: np.ndarray) -> np.ndarray:
    order = np.lexsort(points.T[::-1])
    return points[order[0]]


def support_contact(n: NormSpec, functional, tol: float = DEFAULT_TOL) -> SupportContact:
    """A unit-sphere point maximising ``<functional, u>``.

    Facet kinds report ties between vertices (relative ``tol``) as
    non-unique and return the lexicographically smallest tied vertex.
    """
    (f,) = _check_dim(n, functional)
    if not np.any(f):
        raise DegenerateInput("zero functional")
    if n.kind == "euclidean":
        return SupportContact(f, f / np.linalg.norm(f), True)
    if n.kind == "ellipsoidal":
        u = np.linalg.solve(n.Q, f)
        return SupportContact(f, u / n.evaluate(u), True)
    if n.is_smooth:
        # Lagrange condition for the p-norm: u_i ~ sign(f_i) |f_i|^(1/(p-1)).
        a = np.abs(f) / np.abs(f).max()
        u = np.sign(f) * a ** (1.0 / (n.p - 1.0))
        return SupportContact(f, u / n.evaluate(u), True)
    V = n.extreme_points
    scores = V @ f
    best = scores.max()
    tied = V[scores >= best - tol * abs(best)]
    return SupportContact(f, _lexmin(tied), len(tied) == 1)


# ---------------------------------------------------------------------------
# planar sections


def plane_basis(n: NormSpec, plane=None, must_contain=None) -> np.ndarray:
    """Orthonormal ``(dim, 2)`` basis of a 2-D subspace.

    ``plane`` is two spanning vectors (rows or columns).  In dimension two it
    may be omitted.  When ``must_contain`` is given the subspace has to
    contain it.
    """
    if plane is None:
        if n.dim != 2:
            raise DegenerateInput(f"a 2-D plane must be supplied in dimension {n.dim}")
        E = np.eye(2)
    else:
        P = np.asarray(plane, dtype=float)
        if P.shape == (2, n.dim):
            P = P.T
        if P.shape != (n.dim, 2) or not np.all(np.isfinite(P)):
            raise DimensionMismatch(f"plane must be two vectors of dimension {n.dim}")
        q, r = np.linalg.qr(P)
        if abs(r[1, 1]) <= 1e-12 * max(abs(r[0, 0]), 1e-300):
            raise DegenerateInput("plane vectors are linearly dependent")
        E = q if n.dim > 2 else np.eye(2)
    if must_contain is not None:
        d = np.asarray(must_contain, dtype=float)
        if np.linalg.norm(d - E @ (E.T @ d)) > 1e-9 * np.linalg.norm(d):
            raise DegenerateInput("direction does not lie in the supplied plane")
    return E


def _is_identity(E: np.ndarray) -> bool:
    return E.shape == (2, 2) and np.array_equal(E, np.eye(2))


def _coordinate_axes(E: np.ndarray) -> Optional[tuple[int, int, float, float]]:
    """If the columns of E are signed coordinate axes return (i, j, si, sj)."""
    idx, signs = [], []
    for col in E.T:
        nz = np.flatnonzero(np.abs(col) > 1e-15)
        if len(nz) != 1 or abs(abs(col[nz[0]]) - 1.0) > 1e-15:
            return None
        idx.append(int(nz[0]))
        signs.append(float(np.sign(col[nz[0]])))
    if idx[0] == idx[1]:
        return None
    return idx[0], idx[1], signs[0], signs[1]


def section_polygon(n: NormSpec, E: np.ndarray) -> np.ndarray:
    """Vertices (plane coordinates, counter-clockwise) of the section of a polyhedral ball."""
    if _is_identity(E):
        V = n.extreme_points
        hull = ConvexHull(V)
        return V[hull.vertices]
    R = n.facets @ E
    R = R[np.linalg.norm(R, axis=1) > 1e-14]
    hull = ConvexHull(R)
    ring = hull.vertices
    verts = []
    for i, j in zip(ring, np.roll(ring, -1)):
        verts.append(np.linalg.solve(np.array([R[i], R[j]]), np.ones(2)))
    verts = np.array(verts)
    ang = np.arctan2(verts[:, 1], verts[:, 0])
    return verts[np.argsort(ang)]


def _smooth_planar_support(n: NormSpec, E: np.ndarray, w: np.ndarray) -> np.ndarray:
    if _is_identity(E):
        return support_contact(n, w).point
    if n.kind == "euclidean":
        return E @ (w / np.linalg.norm(w))
    if n.kind == "ellipsoidal":
        QP = E.T @ n.Q @ E
        c = np.linalg.solve(QP, w)
        u = E @ c
        return u / n.evaluate(u)
    axes = _coordinate_axes(E)
    if axes is not None:
        # A coordinate-plane section of a p-norm is the planar p-norm.
        c = support_contact(NormSpec.p_norm(n.p, 2), w).point
        u = E @ c
        return u / n.evaluate(u)
    phi0 = math.atan2(w[1], w[0])

    def g(phi):
        c = np.array([math.cos(phi), math.sin(phi)])
        return float(_cross2(E.T @ n.gradient(E @ c), w))

    phi = brentq(g, phi0 - math.pi / 2, phi0 + math.pi / 2, xtol=1e-15, rtol=1e-15, maxiter=200)
    u = E @ np.array([math.cos(phi), math.sin(phi)])
    return u / n.evaluate(u)


def planar_face(n: NormSpec, E: np.ndarray, w, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Points of the section's unit circle maximising the planar functional ``w``.

    Returns one point, or the two endpoints of an exposed edge.
    """
    w = np.asarray(w, dtype=float)
    if n.is_smooth:
        return [_smooth_planar_support(n, E, w)]
    P = section_polygon(n, E)
    scores = P @ w
    best = scores.max()
    face = P[scores >= best - tol * abs(best)]
    if len(face) == 1:
        return [E @ face[0]]
    edge = np.array([-w[1], w[0]])
    t = face @ edge
    return [E @ face[np.argmin(t)], E @ face[np.argmax(t)]]


# ---------------------------------------------------------------------------
# flat segments and strict convexity


@dataclass(frozen=True)
class FlatSegment:
    a: np.ndarray
    b: np.ndarray
    lambda_ratio: float


def flat_segment_parallel_to(
    n: NormSpec, direction, plane=None, tol: float = DEFAULT_TOL
) -> Optional[FlatSegment]:
    """Maximal segment of the unit sphere parallel to ``direction``, if any.

    The segment sits on the side of the planar normal whose first
    significant coordinate is positive, and is oriented so that ``a - b`` is a
    positive multiple of ``direction``.
    """
    (d,) = _check_dim(n, direction)
    if not np.any(d):
        raise DegenerateInput("zero direction")
    E = plane_basis(n, plane, must_contain=d)
    return _flat_segment_in(n, d, E, tol)


def _flat_segment_in(n: NormSpec, d: np.ndarray, E: np.ndarray, tol: float) -> Optional[FlatSegment]:
    if n.is_strictly_convex:
        return None
    d2 = E.T @ d
    normal = canonical_sign(np.array([-d2[1], d2[0]]))
    face = planar_face(n, E, normal, tol)
    if len(face) < 2:
        return None
    a, b = face
    if np.dot(a - b, d) < 0:
        a, b = b, a
    return FlatSegment(a, b, float(np.linalg.norm(a - b) / np.linalg.norm(d)))


def first_flat_segment(n: NormSpec, E: np.ndarray, tol: float = DEFAULT_TOL) -> Optional[FlatSegment]:
    """Sweep edge normals from angle pi/2 downwards and return the first flat segment found."""
    if n.is_strictly_convex:
        return None
    P = section_polygon(n, E)
    best = None
    for i in range(len(P)):
        edge = P[(i + 1) % len(P)] - P[i]
        if np.linalg.norm(edge) <= tol:
            continue
        normal = canonical_sign(np.array([edge[1], -edge[0]]) / np.linalg.norm(edge))
        ang = math.atan2(normal[1], normal[0])
        if best is None or ang > best[0]:
            best = (ang, normal)
    if best is None:
        return None
    normal = best[1]
    return _flat_segment_in(n, E @ np.array([-normal[1], normal[0]]), E, tol)


def candidate_planes(n: NormSpec):
    """Planes to search for flat segments: coordinate planes, then vertex-pair planes."""
    if n.dim == 2:
        yield np.eye(2)
        return
    eye = np.eye(n.dim)
    for i, j in itertools.combinations(range(n.dim), 2):
        yield eye[:, [i, j]]
    if n.kind == "polyhedral":
        V = n.extreme_points
        for i, j in itertools.combinations(range(len(V)), 2):
            P = np.array([V[i], V[j]]).T
            if np.linalg.matrix_rank(P, tol=1e-10) == 2:
                yield np.linalg.qr(P)[0]


def find_flat_segment(n: NormSpec, tol: float = DEFAULT_TOL) -> tuple[Optional[FlatSegment], Optional[np.ndarray]]:
    """First flat segment over :func:`candidate_planes`, with its plane basis."""
    if n.is_strictly_convex:
        return None, None
    for E in candidate_planes(n):
        seg = first_flat_segment(n, E, tol)
        if seg is not None:
            return seg, E
    return None, None


@dataclass(frozen=True)
class ConvexityReport:
    strictly_convex: bool
    witness: Optional[FlatSegment]
    sampled_chords: int
    flat_chords: int

    @property
    def consistent(self) -> bool:
        # A flat sampled chord contradicts strict convexity; the converse is
        # only probabilistic, so it is not treated as a conflict.
        return not (self.strictly_convex and self.flat_chords > 0)


def strict_convexity_probe(n: NormSpec, num_directions: int = 256, seed: int = 0) -> ConvexityReport:
    if num_directions < 1:
        raise ValueError("num_directions must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((num_directions, n.dim))
    w = u + 0.1 * np.linalg.norm(u, axis=1, keepdims=True) * rng.standard_normal((num_directions, n.dim))
    u = u / n.evaluate(u)[:, None]
    w = w / n.evaluate(w)[:, None]
    # Very short chords bulge by less than the flatness threshold even on
    # curved spheres (quartically near the axes of p-norms with p > 2).
    valid = np.linalg.norm(u - w, axis=1) >= 0.02
    mid = n.evaluate(0.5 * (u[valid] + w[valid]))
    flat = int(np.sum(np.abs(mid - 1.0) <= 1e-12))
    sampled = int(valid.sum())
    if n.is_strictly_convex:
        return ConvexityReport(True, None, sampled, flat)
    seg, _ = find_flat_segment(n)
    return ConvexityReport(False, seg, sampled, flat)


def restrict(n: NormSpec, E: np.ndarray) -> NormSpec:
    """The norm restricted to the span of the orthonormal columns of ``E``.

    Supported where the restriction stays in the closed kind enumeration:
    euclidean and ellipsoidal norms on any subspace, p-norms on coordinate
    subspaces, and polyhedral or facet norms on planes (the section is a
    polygon).
    """
    E = np.asarray(E, dtype=float)
    k = E.shape[1]
    if k == n.dim and np.allclose(E, np.eye(n.dim), atol=0.0):
        return n
    if n.kind == "euclidean":
        return NormSpec.euclidean(k)
    if n.kind == "ellipsoidal":
        return NormSpec.ellipsoidal(E.T @ n.Q @ E)
    if n.kind == "p_norm":
        for col in E.T:
            nz = np.flatnonzero(np.abs(col) > 1e-15)
            if len(nz) != 1 or abs(abs(col[nz[0]]) - 1.0) > 1e-15:
                break
        else:
            rows = [int(np.flatnonzero(np.abs(c) > 1e-15)[0]) for c in E.T]
            if len(set(rows)) == k:
                return NormSpec.p_norm(n.p, k)
    if not n.is_smooth and k == 2:
        return NormSpec.polyhedral(section_polygon(n, E))
    raise InvalidNorm(f"restriction of {n.label} to this subspace is not representable")

