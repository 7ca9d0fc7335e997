import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minkres.errors import DegenerateInput, DimensionMismatch, InvalidNorm
from minkres.norms import (
    NormSpec,
    eval_norm,
    find_flat_segment,
    flat_segment_parallel_to,
    parallelogram_defect,
    restrict,
    sphere_point,
    strict_convexity_probe,
    support_contact,
)

from conftest import ALL_NORMS, HEXAGON, fixture_norm, sample_norms

NORMS = sample_norms()
IDS = [n.label for n in NORMS]


# -- evaluation ----------------------------------------------------------------


def test_eval_examples():
    assert eval_norm(NormSpec.p_norm(math.inf, 2), [1, 1]) == 1.0
    assert eval_norm(NormSpec.euclidean(2), [3, 4]) == 5.0
    assert eval_norm(NormSpec.p_norm(4, 2), [1, 1]) == pytest.approx(2**0.25, abs=1e-15)


def test_polyhedral_matches_p_norm_facets():
    # the square and the diamond given by vertices agree with the analytic kinds
    square = NormSpec.polyhedral([[1, 1], [1, -1], [-1, 1], [-1, -1]])
    diamond = NormSpec.polyhedral([[1, 0], [-1, 0], [0, 1], [0, -1]])
    v = np.random.default_rng(0).standard_normal((100, 2))
    assert np.allclose(square.evaluate(v), np.abs(v).max(1), atol=1e-13)
    assert np.allclose(diamond.evaluate(v), np.abs(v).sum(1), atol=1e-13)


def test_hexagon_minkowski_functional():
    hexa = NormSpec.polyhedral(HEXAGON)
    assert eval_norm(hexa, [0, 2]) == pytest.approx(2.0)
    assert eval_norm(hexa, [1.5, 0]) == pytest.approx(1.5)
    assert eval_norm(hexa, [0.75, 1.5]) == pytest.approx(1.5)


def test_eval_errors():
    n = NormSpec.euclidean(2)
    with pytest.raises(DimensionMismatch):
        eval_norm(n, [1, 2, 3])
    with pytest.raises(DegenerateInput):
        eval_norm(n, [1, math.nan])


@pytest.mark.parametrize(
    "kwargs",
    [
        {"kind": "p_norm", "dim": 2, "p": 0.5},
        {"kind": "ellipsoidal", "dim": 2, "Q": [[1, 2], [2, 1]]},
        {"kind": "ellipsoidal", "dim": 2, "Q": [[1, 0.1], [0, 1]]},
        {"kind": "polyhedral", "dim": 2, "vertices": [[1, 0], [0, 1], [-1, 0]]},
        {"kind": "polyhedral", "dim": 2, "vertices": [[1, 1], [-1, -1]]},
        {"kind": "simplex", "dim": 2},
        {"kind": "euclidean", "dim": 1},
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(InvalidNorm):
        NormSpec.from_dict(kwargs)


@pytest.mark.parametrize("name", ALL_NORMS)
def test_json_round_trip(name):
    n = fixture_norm(name)
    again = NormSpec.from_dict(n.to_dict())
    assert again.key() == n.key()


def test_difference_is_cancellation_free():
    n = NormSpec.p_norm(4, 3)
    far = np.array([1e6, 3e5, 0.5])
    u, v = far + [0, 0, 1e-7], far - [0, 0, 1e-7]
    d = float(n.difference(u, v))
    # exact value: the derivative along e3 times 2e-7
    grad = n.gradient(far)[2]
    assert d == pytest.approx(grad * 2e-7, rel=1e-6)
    assert n.difference(far, far) == 0.0


# -- property tests ------------------------------------------------------------


@pytest.mark.parametrize("n", NORMS, ids=IDS)
@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_norm_axioms(n, seed):
    rng = np.random.default_rng(seed)
    u, v = rng.standard_normal((2, n.dim)) * rng.uniform(0.01, 100)
    lam = rng.uniform(-50, 50)
    nu, nv = eval_norm(n, u), eval_norm(n, v)
    assert nu > 0
    assert eval_norm(n, lam * u) == pytest.approx(abs(lam) * nu, rel=1e-12)
    assert eval_norm(n, u + v) <= nu + nv + 1e-12 * (nu + nv)
    if n.kind == "polyhedral":
        assert eval_norm(n, -u) == pytest.approx(nu, rel=1e-12)
    else:
        assert eval_norm(n, -u) == nu


@pytest.mark.parametrize("n", NORMS, ids=IDS)
def test_support_contact_maximises(n):
    rng = np.random.default_rng(1)
    for f in rng.standard_normal((5, n.dim)):
        sc = support_contact(n, f)
        assert abs(eval_norm(n, sc.point) - 1) < 1e-9
        W = rng.standard_normal((1000, n.dim))
        spheres = W / n.evaluate(W)[:, None]
        assert np.dot(f, sc.point) >= np.max(spheres @ f) - 1e-9


def test_support_contact_examples():
    sc = support_contact(NormSpec.euclidean(2), [1, 0])
    assert np.allclose(sc.point, [1, 0]) and sc.is_exposed_uniquely
    sc = support_contact(NormSpec.p_norm(4, 3), [1, 8, 0])
    assert np.allclose(sc.point, np.array([1, 2, 0]) / eval_norm(NormSpec.p_norm(4, 3), [1, 2, 0]), atol=1e-14)
    sc = support_contact(NormSpec.p_norm(math.inf, 2), [1, 0])
    assert not sc.is_exposed_uniquely
    assert any(np.allclose(sc.point, p) for p in ([1, 1], [1, -1]))
    q = np.diag([1.0, 2.0, 3.0])
    sc = support_contact(NormSpec.ellipsoidal(q), [1, 1, 1])
    u = np.linalg.solve(q, np.ones(3))
    assert np.allclose(sc.point, u / np.sqrt(u @ q @ u), atol=1e-14)
    with pytest.raises(DegenerateInput):
        support_contact(NormSpec.euclidean(2), [0, 0])


def test_sphere_point_examples():
    assert np.array_equal(sphere_point(NormSpec.p_norm(math.inf, 2), [2, 0]), [1, 0])
    assert np.allclose(sphere_point(NormSpec.euclidean(2), [1, 1]), [math.sqrt(0.5)] * 2)
    assert np.allclose(sphere_point(NormSpec.p_norm(4, 2), [1, 1]), [2**-0.25] * 2)
    with pytest.raises(DegenerateInput):
        sphere_point(NormSpec.euclidean(2), [0, 0])


# -- flat segments -------------------------------------------------------------


def test_flat_segment_examples():
    seg = flat_segment_parallel_to(NormSpec.p_norm(math.inf, 2), [-1, 0])
    assert np.allclose(seg.a, [-1, 1]) and np.allclose(seg.b, [1, 1])
    assert seg.lambda_ratio == pytest.approx(2.0)
    assert flat_segment_parallel_to(NormSpec.euclidean(2), [1, 0]) is None
    seg = flat_segment_parallel_to(NormSpec.polyhedral(HEXAGON), [1, 0])
    assert np.allclose(seg.a, [0.5, 1]) and np.allclose(seg.b, [-0.5, 1])
    assert seg.lambda_ratio == pytest.approx(1.0)


def test_flat_segment_needs_plane_in_3d():
    n = NormSpec.p_norm(math.inf, 3)
    with pytest.raises(DegenerateInput):
        flat_segment_parallel_to(n, [1, 0, 0])
    seg = flat_segment_parallel_to(n, [1, 0, 0], plane=[[1, 0, 0], [0, 1, 0]])
    assert seg is not None and np.allclose(seg.a - seg.b, 2 * np.array([1, 0, 0]))


@pytest.mark.parametrize("n", [x for x in NORMS if not x.is_strictly_convex], ids=lambda n: n.label)
def test_flat_segment_lies_on_sphere(n):
    seg, E = find_flat_segment(n)
    for p in (seg.a, seg.b, 0.5 * (seg.a + seg.b)):
        assert abs(eval_norm(n, p) - 1) < 1e-9
    assert np.linalg.norm(seg.a - seg.b) > 0


def test_parallelogram_examples():
    e1, e2 = [1, 0], [0, 1]
    assert parallelogram_defect(NormSpec.p_norm(1, 2), e1, e2) == pytest.approx(-4.0, abs=1e-12)
    assert parallelogram_defect(NormSpec.p_norm(4, 2), e1, e2) == pytest.approx(4 - 2 * math.sqrt(2), abs=1e-12)


@pytest.mark.parametrize("n", [x for x in NORMS if x.is_quadratic], ids=lambda n: n.label)
def test_parallelogram_zero_for_quadratic(n):
    rng = np.random.default_rng(2)
    X, Y = rng.standard_normal((2, 1000, n.dim))
    assert max(abs(parallelogram_defect(n, x, y)) for x, y in zip(X, Y)) < 1e-10


def test_strict_convexity_examples():
    assert strict_convexity_probe(NormSpec.p_norm(3, 4), 64, 0).strictly_convex
    rep = strict_convexity_probe(NormSpec.p_norm(math.inf, 2), 64, 0)
    assert not rep.strictly_convex
    assert np.allclose(rep.witness.a, [-1, 1]) and np.allclose(rep.witness.b, [1, 1])
    assert strict_convexity_probe(NormSpec.ellipsoidal(np.diag([1.0, 2, 3])), 64, 0).strictly_convex


@pytest.mark.parametrize("name", ALL_NORMS)
def test_probe_sampling_consistent(name):
    rep = strict_convexity_probe(fixture_norm(name), 256, 3)
    assert rep.consistent
    if not rep.strictly_convex:
        assert rep.flat_chords > 0


def test_restrict():
    n = NormSpec.p_norm(3, 4)
    sub = restrict(n, np.eye(4)[:, [0, 2]])
    assert sub.kind == "p_norm" and sub.dim == 2 and sub.p == 3
    hexa_cut = restrict(NormSpec.p_norm(math.inf, 3), np.eye(3)[:, :2])
    v = np.random.default_rng(0).standard_normal((20, 2))
    assert np.allclose(hexa_cut.evaluate(v), np.abs(v).max(1))
    with pytest.raises(InvalidNorm):
        restrict(NormSpec.p_norm(3, 3), np.linalg.qr(np.random.default_rng(0).standard_normal((3, 2)))[0])
