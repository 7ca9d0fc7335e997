"""Projective Gauss map of a strictly convex unit ball and Euclidean classification.

The Gauss map sends the line ``[v]`` of a functional to the line through the
unit-sphere point where ``v`` attains its maximum.  For an inner-product
norm it is projective-linear, ``G([v]) = [A v]`` with ``A`` proportional to
the inverse Gram matrix; fitting ``A`` and measuring the residual separates
quadratic norms from the rest.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bisector import reflection_isometry_check
from .errors import DegenerateInput, InvalidNorm, NotStrictlyConvex
from .norms import NormSpec, as_vector, canonical_sign, restrict, strict_convexity_probe, support_contact

FIT_ACCEPT = 1e-6
FIT_REJECT = 1e-3


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A line through the origin, stored as a unit vector whose first significant coordinate is positive."""

    rep: np.ndarray

    def __post_init__(self):
        v = as_vector(self.rep, name="rep")
        nv = np.linalg.norm(v)
        if nv == 0:
            raise DegenerateInput("the zero vector spans no line")
        object.__setattr__(self, "rep", canonical_sign(v / nv))

    def distance(self, other: "ProjectivePoint") -> float:
        """Sine of the angle between the two lines."""
        # the rejection norm is accurate near zero, unlike sqrt(1 - cos^2)
        p, q = self.rep, other.rep
        return min(1.0, float(np.linalg.norm(q - np.dot(p, q) * p)))

    def __eq__(self, other) -> bool:
        return isinstance(other, ProjectivePoint) and np.array_equal(self.rep, other.rep)

    __hash__ = None


def _require_strict(n: NormSpec):
    if not n.is_strictly_convex:
        raise NotStrictlyConvex(f"the Gauss map of {n.label} is multivalued on its facets")


def gauss_map(n: NormSpec, v) -> ProjectivePoint:
    _require_strict(n)
    rep = v.rep if isinstance(v, ProjectivePoint) else v
    return ProjectivePoint(support_contact(n, rep).point)


def _unit_rows(X: np.ndarray) -> np.ndarray:
    return X / np.linalg.norm(X, axis=1, keepdims=True)


@dataclass(frozen=True)
class GaussSample:
    inputs: np.ndarray
    outputs: np.ndarray

    def __post_init__(self):
        if self.inputs.shape != self.outputs.shape:
            raise ValueError("inputs and outputs must have equal shapes")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["v1", "v2", "v3", "g1", "g2", "g3"])
        for v, g in zip(self.inputs, self.outputs):
            w.writerow([repr(float(t)) for t in np.concatenate([v, g])])
        return buf.getvalue()


def sample_gauss(n: NormSpec, count: int = 64, seed: int = 0) -> GaussSample:
    _require_strict(n)
    rng = np.random.default_rng(seed)
    V = _unit_rows(rng.standard_normal((count, n.dim)))
    V = np.array([canonical_sign(v) for v in V])
    W = np.array([gauss_map(n, v).rep for v in V])
    return GaussSample(V, W)


def line_preservation_test(n: NormSpec, trials: int = 200, seed: int = 0) -> float:
    """Largest ``|det|`` of unit representatives of ``G(v1), G(v2), G(v)`` with ``v`` in ``span(v1, v2)``."""
    if n.dim != 3:
        raise DegenerateInput("line preservation is tested on three-dimensional norms")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _require_strict(n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        v1, v2 = rng.standard_normal((2, 3))
        a, b = rng.standard_normal(2)
        g = np.array([gauss_map(n, w).rep for w in (v1, v2, a * v1 + b * v2)])
        worst = max(worst, abs(float(np.linalg.det(g))))
    return worst


def _cross_matrix(w: np.ndarray) -> np.ndarray:
    return np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])


@dataclass(frozen=True)
class GaussFit:
    A: np.ndarray
    residual: float
    definiteness: str

    def to_dict(self) -> dict:
        return {
            "A": [[float(v) for v in row] for row in self.A],
            "residual": float(self.residual),
            "definiteness": self.definiteness,
        }


def fit_linear(g: GaussSample, accept: float = FIT_ACCEPT) -> GaussFit:
    """Homogeneous least-squares fit of ``A`` with ``G([v]) = [A v]``.

    Incidence ``w x (A v) = 0`` is linear in the nine entries of ``A``; the
    smallest right singular vector of the stacked system is the fit.  ``A``
    is scaled to unit Frobenius norm with its largest-magnitude entry
    positive.  Definiteness is reported only for fits with residual below
    ``accept``.
    """
    V, W = np.asarray(g.inputs, float), np.asarray(g.outputs, float)
    if V.ndim != 2 or V.shape[1] != 3:
        raise DegenerateInput("fit_linear expects three-dimensional samples")
    if len(V) < 12:
        raise DegenerateInput(f"need at least 12 samples, got {len(V)}")
    V, W = _unit_rows(V), _unit_rows(W)
    eye = np.eye(3)
    M = np.vstack([_cross_matrix(w) @ np.kron(eye, v[None, :]) for v, w in zip(V, W)])
    _, s, Vt = np.linalg.svd(M)
    if s[-2] <= 1e-10 * s[0]:
        raise DegenerateInput("samples do not determine A (degenerate configuration)")
    A = Vt[-1].reshape(3, 3)
    A = A / np.linalg.norm(A)
    k = np.unravel_index(np.argmax(np.abs(A)), A.shape)
    if A[k] < 0:
        A = -A
    AV = _unit_rows(V @ A.T)
    residual = float(np.max(np.linalg.norm(np.cross(AV, W), axis=1)))
    definiteness = "not_applicable"
    if residual < accept:
        q = np.einsum("ij,ij->i", V @ A.T, V)
        eig = np.linalg.eigvalsh(0.5 * (A + A.T))
        if np.all(q > 0) and eig.min() > 0:
            definiteness = "positive_definite"
        elif np.all(q < 0) and eig.max() < 0:
            definiteness = "negative_definite"
        else:
            definiteness = "indefinite"
    return GaussFit(A, residual, definiteness)


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class ClassifyBudget:
    pairs: int = 1000
    gauss_samples: int = 64
    reflection_axes: int = 4
    chords: int = 256


@dataclass
class Classification:
    norm_class: str
    conflict: bool
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"class": self.norm_class, "conflict": self.conflict, "evidence": self.evidence}


def _max_relative_defect(n: NormSpec, pairs: int, rng: np.random.Generator) -> float:
    X = rng.standard_normal((pairs, n.dim))
    Y = rng.standard_normal((pairs, n.dim))
    nx, ny = n.evaluate(X), n.evaluate(Y)
    defect = 2 * (nx**2 + ny**2) - (n.evaluate(X + Y) ** 2 + n.evaluate(X - Y) ** 2)
    return float(np.max(np.abs(defect) / (nx**2 + ny**2)))


def _gauss_stage(n: NormSpec, budget: ClassifyBudget, seed: int) -> dict:
    E = np.eye(n.dim)[:, :3]
    try:
        sub = restrict(n, E)
    except InvalidNorm:
        return {"method": "gauss_fit", "skipped": "restriction to a coordinate subspace is not representable"}
    count = budget.gauss_samples
    fit = fit_linear(sample_gauss(sub, count, seed))
    resampled = False
    if FIT_ACCEPT <= fit.residual <= FIT_REJECT:
        count *= 2
        fit = fit_linear(sample_gauss(sub, count, seed + 1))
        resampled = True
    if fit.residual < FIT_ACCEPT:
        verdict = fit.definiteness in ("positive_definite", "negative_definite")
    elif fit.residual > FIT_REJECT:
        verdict = False
    else:
        verdict = None
    return {
        "method": "gauss_fit",
        "samples": count,
        "resampled": resampled,
        "fit": fit.to_dict(),
        "euclidean": verdict,
    }


def _reflection_stage(n: NormSpec, budget: ClassifyBudget, rng: np.random.Generator, seed: int) -> dict:
    reports = []
    for k in range(budget.reflection_axes):
        z = rng.standard_normal(2)
        rep = reflection_isometry_check(n, z, seed=seed + k)
        reports.append(
            {
                "z": [float(t) for t in z],
                "bisector_is_line": rep.bisector_is_line,
                "isometry_residual": rep.isometry_residual,
            }
        )
    euclid = all(r["bisector_is_line"] and r["isometry_residual"] < 1e-9 for r in reports)
    return {"method": "reflection", "checks": reports, "euclidean": euclid}


def classify_norm(n: NormSpec, budget: ClassifyBudget = ClassifyBudget(), seed: int = 0) -> Classification:
    """Classify ``n`` as euclidean, strictly_convex_non_euclidean or non_strictly_convex.

    Three independent stages are run and must agree: the strict-convexity
    probe, the parallelogram defect on random pairs, and either a Gauss-map
    fit (dimension >= 3, strictly convex norms) or reflection checks of
    planar bisectors.  Disagreements are returned as a conflict with the raw
    numbers rather than raised.
    """
    rng = np.random.default_rng(seed)
    probe = strict_convexity_probe(n, budget.chords, seed)
    defect = _max_relative_defect(n, budget.pairs, rng)
    evidence: dict = {
        "strict_convexity": {
            "strictly_convex": probe.strictly_convex,
            "sampled_chords": probe.sampled_chords,
            "flat_chords": probe.flat_chords,
            "witness": None
            if probe.witness is None
            else {"a": probe.witness.a.tolist(), "b": probe.witness.b.tolist(), "lambda_ratio": probe.witness.lambda_ratio},
        },
        "parallelogram": {"max_relative_defect": defect, "euclidean": defect <= 1e-10},
    }
    if n.dim == 2:
        evidence["third_stage"] = _reflection_stage(n, budget, rng, seed)
    elif probe.strictly_convex:
        evidence["third_stage"] = _gauss_stage(n, budget, seed)
    else:
        evidence["third_stage"] = {"method": "gauss_fit", "skipped": "not strictly convex", "euclidean": False}

    stage2 = evidence["parallelogram"]["euclidean"]
    stage3 = evidence["third_stage"].get("euclidean")
    conflict = not probe.consistent
    if not probe.strictly_convex:
        label = "non_strictly_convex"
        conflict |= stage2 or stage3 is True
    else:
        label = "euclidean" if stage2 else "strictly_convex_non_euclidean"
        conflict |= stage3 is None or stage3 != stage2
    return Classification(label, bool(conflict), evidence)
