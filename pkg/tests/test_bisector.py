import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minkres.bisector import (
    Bisector,
    flat_ray_cone,
    line_intersect,
    membership,
    reflection_isometry_check,
    region_bounds,
    sample_bisector,
    slab_fit,
)
from minkres.errors import DegenerateInput, DimensionMismatch
from minkres.norms import NormSpec, flat_segment_parallel_to

from conftest import HEXAGON, sample_norms

LINF2 = NormSpec.p_norm(math.inf, 2)
NORMS = sample_norms()


def test_membership_examples():
    b = Bisector(NormSpec.euclidean(2), [0, 0], [2, 0])
    assert membership(b, [1, 5]) == (True, 0.0)
    ok, res = membership(b, [0, 5])
    assert not ok and res == pytest.approx(math.sqrt(29) - 5, abs=1e-15)
    assert membership(Bisector(LINF2, [0, 0], [1, 1]), [2, -1])[0]


def test_bisector_rejects_bad_input():
    with pytest.raises(DegenerateInput):
        Bisector(LINF2, [1, 1], [1, 1])
    with pytest.raises(DimensionMismatch):
        Bisector(LINF2, [0, 0, 0], [1, 1, 1])
    with pytest.raises(ValueError):
        membership(Bisector(LINF2, [0, 0], [1, 0]), [0, 0], tol=0)


def test_line_intersect_examples():
    (p,) = line_intersect(Bisector(NormSpec.euclidean(2), [0, 0], [1, 0]), [0, 3])
    assert np.allclose(p, [0.5, 3], atol=1e-12)
    (p,) = line_intersect(Bisector(LINF2, [0, 0], [1, 1]), [2, 0])
    assert np.allclose(p, [1.5, -0.5], atol=1e-12)
    pts = line_intersect(Bisector(LINF2, [-1, 0], [1, 0]), [0, 2])
    assert len(pts) == 2
    assert np.allclose(pts[0], [-1, 2], atol=1e-9) and np.allclose(pts[1], [1, 2], atol=1e-9)


@pytest.mark.parametrize("n", NORMS, ids=lambda n: n.label)
def test_sampled_points_are_members(n):
    rng = np.random.default_rng(5)
    x, y = rng.standard_normal((2, n.dim))
    b = Bisector(n, x, y)
    pts = sample_bisector(b, rng.standard_normal((200, n.dim)) * 20)
    assert all(membership(b, p, 1e-9)[0] for p in pts)


def test_region_bounds_examples():
    rb = region_bounds(Bisector(NormSpec.euclidean(2), [0, 0], [1, 0]))
    assert np.allclose(np.abs(rb.p), [0, 1], atol=1e-12)
    rb = region_bounds(Bisector(NormSpec.p_norm(4, 2), [0, 0], [1, 0]))
    assert np.allclose(np.abs(rb.p), [0, 1], atol=1e-12)
    rb = region_bounds(Bisector(NormSpec.p_norm(4, 2), [0, 0], [1, 1]))
    assert np.allclose(np.abs(rb.p), [2**-0.25] * 2, atol=1e-9)
    assert rb.p[0] * rb.p[1] < 0
    assert region_bounds(Bisector(LINF2, [0, 0], [1, 0])) is None


@pytest.mark.parametrize("n", [x for x in NORMS if x.dim == 2 and x.is_strictly_convex], ids=lambda n: n.label)
def test_bisector_stays_in_region(n):
    rng = np.random.default_rng(9)
    x, y = rng.standard_normal((2, 2))
    b = Bisector(n, x, y)
    rb = region_bounds(b)
    pts = sample_bisector(b, b.midpoint + rng.standard_normal((300, 2)) * 50)
    ratios = np.array([rb.ratio(p) for p in pts])
    assert np.all((ratios > -1e-9) & (ratios < 1 + 1e-9))


def test_flat_ray_cone_example():
    b = Bisector(LINF2, [0, 0], [1, 0])
    seg = flat_segment_parallel_to(LINF2, b.x - b.y)
    cone = flat_ray_cone(b, seg)
    assert np.allclose(cone.apex, [0.5, 0.5])
    assert np.allclose(cone.point(1, 0), [-0.5, 1.5])
    assert np.allclose(cone.point(0, 3), [3.5, 3.5])


@settings(max_examples=50, deadline=None)
@given(s=st.floats(0, 100), t=st.floats(0, 100))
def test_flat_ray_cone_membership_hexagon(s, t):
    n = NormSpec.polyhedral(HEXAGON)
    b = Bisector(n, [0, 0], [1, 0])
    cone = flat_ray_cone(b, flat_segment_parallel_to(n, b.x - b.y))
    ok, res = membership(b, cone.point(s, t), 1e-9)
    assert ok


def test_flat_ray_cone_rejects_wrong_segment():
    b = Bisector(LINF2, [0, 0], [1, 1])
    seg = flat_segment_parallel_to(LINF2, [1, 0])
    with pytest.raises(DegenerateInput):
        flat_ray_cone(b, seg)


def test_slab_euclidean_sandwiched():
    fit = slab_fit(Bisector(NormSpec.euclidean(3), [0, 0, 0], [0, 0, 1]))
    assert fit.verdict == "sandwiched"
    assert max(fit.widths_by_radius) < 1e-8
    assert np.allclose(np.abs(fit.normal), [0, 0, 1], atol=1e-6)


def test_slab_lp_axis_plane_is_flat():
    # the coordinate reflection z3 -> 1 - z3 swaps 0 and e3, so this bisector is a plane
    fit = slab_fit(Bisector(NormSpec.p_norm(4, 3), [0, 0, 0], [0, 0, 1]))
    assert fit.verdict == "sandwiched"
    assert np.allclose(fit.samples[:, 3], 0.5, atol=1e-9)


def test_slab_lp_generic_direction_grows():
    fit = slab_fit(Bisector(NormSpec.p_norm(4, 3), [0, 0, 0], [1, 1, 1]))
    assert fit.verdict == "not_sandwiched" and fit.growth > 4


def test_slab_linf_plane_grows():
    fit = slab_fit(Bisector(LINF2, [0, 0], [1, 0]))
    assert fit.verdict == "not_sandwiched"


def test_slab_fit_validates_radii():
    b = Bisector(NormSpec.euclidean(2), [0, 0], [1, 0])
    with pytest.raises(ValueError):
        slab_fit(b, radii=[4, 1])
    with pytest.raises(ValueError):
        slab_fit(b, samples_per_radius=2)


def test_slab_csv_header():
    fit = slab_fit(Bisector(NormSpec.euclidean(2), [0, 0], [1, 0]), samples_per_radius=8)
    lines = fit.samples_csv().splitlines()
    assert lines[0] == "radius,coord_1,coord_2,residual"
    assert len(lines) == 1 + len(fit.samples)


@pytest.mark.parametrize(
    "n",
    [NormSpec.euclidean(2), NormSpec.ellipsoidal([[2.0, 0.5], [0.5, 1.0]])],
    ids=["euclid2", "ellipsoid2"],
)
def test_reflection_quadratic(n):
    for z in ([1, 0], [0.3, -2], [1, 0.37]):
        rep = reflection_isometry_check(n, z, samples=500)
        assert rep.bisector_is_line and rep.isometry_residual < 1e-9


def test_reflection_lp_generic():
    rep = reflection_isometry_check(NormSpec.p_norm(4, 2), [1, 0.37])
    assert not rep.bisector_is_line and rep.isometry_residual is None


def test_reflection_lp_symmetric_axis_is_line():
    # z on a coordinate axis: the bisector is the other axis
    rep = reflection_isometry_check(NormSpec.p_norm(4, 2), [1, 0])
    assert rep.bisector_is_line and rep.isometry_residual < 1e-9


# -- covariance ----------------------------------------------------------------


@pytest.mark.parametrize("n", NORMS, ids=lambda n: n.label)
@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_membership_covariance(n, seed):
    rng = np.random.default_rng(seed)
    x, y, z, c = rng.standard_normal((4, n.dim)) * 3
    lam = rng.uniform(0.1, 10) * rng.choice([-1, 1])
    b = Bisector(n, x, y)
    bt = Bisector(n, lam * x + c, lam * y + c)
    _, r0 = membership(b, z)
    _, r1 = membership(bt, lam * z + c)
    scale = float(n.evaluate(z - x) + n.evaluate(z - y))
    assert abs(r1 - abs(lam) * r0) <= 1e-12 * abs(lam) * max(1.0, scale)
