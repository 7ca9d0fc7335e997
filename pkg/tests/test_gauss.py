import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minkres.errors import DegenerateInput, NotStrictlyConvex
from minkres.gauss import (
    ClassifyBudget,
    GaussSample,
    ProjectivePoint,
    classify_norm,
    fit_linear,
    gauss_map,
    line_preservation_test,
    sample_gauss,
)
from minkres.norms import NormSpec

from conftest import ALL_NORMS, fixture_norm

ELLIPSOID3 = NormSpec.ellipsoidal(np.diag([1.0, 2.0, 3.0]))
L4_3 = NormSpec.p_norm(4, 3)


def test_projective_point_normalisation():
    p = ProjectivePoint(np.array([-2.0, 0.0, 0.0]))
    assert np.array_equal(p.rep, [1.0, 0.0, 0.0])
    assert p == ProjectivePoint(np.array([3.0, 0.0, 0.0]))
    assert p.distance(ProjectivePoint(np.array([0.0, 1.0, 0.0]))) == pytest.approx(1.0)
    with pytest.raises(DegenerateInput):
        ProjectivePoint(np.zeros(3))


def test_gauss_map_euclidean_is_identity():
    rng = np.random.default_rng(0)
    for v in rng.standard_normal((20, 3)):
        assert gauss_map(NormSpec.euclidean(3), v).distance(ProjectivePoint(v)) < 1e-12


def test_gauss_map_ellipsoid_example():
    g = gauss_map(ELLIPSOID3, [1, 1, 1])
    assert g.distance(ProjectivePoint(np.array([6.0, 3.0, 2.0]))) < 1e-12


def test_gauss_map_refuses_facets():
    with pytest.raises(NotStrictlyConvex):
        gauss_map(NormSpec.p_norm(math.inf, 3), [1, 0, 0])


def test_ellipsoid_fit_recovers_inverse_gram():
    fit = fit_linear(sample_gauss(ELLIPSOID3, 64, 0))
    expected = np.diag([1.0, 0.5, 1 / 3])
    expected /= np.linalg.norm(expected)
    assert np.linalg.norm(fit.A - expected) / np.linalg.norm(expected) < 1e-6
    assert fit.residual < 1e-8 and fit.definiteness == "positive_definite"


def test_l4_fit_fails():
    fit = fit_linear(sample_gauss(L4_3, 64, 0))
    assert fit.residual > 1e-3 and fit.definiteness == "not_applicable"
    assert line_preservation_test(L4_3, 200, 0) > 1e-2


def test_line_preservation_quadratic():
    assert line_preservation_test(ELLIPSOID3, 50, 0) < 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_synthetic_fit(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((3, 3))
    if abs(np.linalg.det(A)) < 0.1:
        A += 2 * np.eye(3)
    V = rng.standard_normal((40, 3))
    W = V @ A.T * rng.choice([-1.0, 1.0], size=(40, 1))
    fit = fit_linear(GaussSample(V, W))
    assert fit.residual < 1e-10
    target = A / np.linalg.norm(A)
    assert min(np.linalg.norm(fit.A - target), np.linalg.norm(fit.A + target)) < 1e-8


def test_fit_needs_enough_samples():
    with pytest.raises(DegenerateInput):
        fit_linear(GaussSample(np.eye(3), np.eye(3)))


def test_gauss_csv():
    text = sample_gauss(ELLIPSOID3, 12, 0).to_csv().splitlines()
    assert text[0] == "v1,v2,v3,g1,g2,g3" and len(text) == 13


EXPECTED = {
    "euclid": "euclidean",
    "ellipsoid": "euclidean",
    "l2_": "euclidean",
    "l1_": "non_strictly_convex",
    "linf": "non_strictly_convex",
    "hexagon": "non_strictly_convex",
}


def expected_class(name):
    for prefix, label in EXPECTED.items():
        if name.startswith(prefix):
            return label
    return "strictly_convex_non_euclidean"


@pytest.mark.parametrize("name", ALL_NORMS)
def test_classify_fixtures(name):
    result = classify_norm(fixture_norm(name), ClassifyBudget(pairs=500), seed=0)
    assert not result.conflict, result.evidence
    assert result.norm_class == expected_class(name)
