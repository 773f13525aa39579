import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taubnut.core import GeometryConfig, NegativeEpsilon, RealChartPoint
from taubnut.fields import NoPositiveRoot
from taubnut.moment import (HalfPlane, Membership, convexity_experiment, grad_mu2,
                            lower_envelope, membership, moment_image_neg, moment_image_neg_n1,
                            moment_map, moment_polytope, moment_xyz, sample_boundary)
from taubnut.numerics import FDSettings, fd_gradient
from taubnut.realchart import symplectic_form


def test_moment_map_examples():
    m = moment_map(GeometryConfig(0, (0.0,)), RealChartPoint(0, 0, 0, -2))
    assert (m.mu1, m.mu2) == (2.0, 0.0)
    m = moment_map(GeometryConfig(0, (0.0,)), RealChartPoint(0, 3, 4, 0))
    assert (m.mu1, m.mu2) == pytest.approx((0, 2.5))
    m = moment_map(GeometryConfig(2, (0.0,)), RealChartPoint(0, 3, 4, 0))
    assert (m.mu1, m.mu2) == pytest.approx((0, 15))


def test_moment_map_generates_torus_action(rng):
    """omega(X_i, .) = -d mu_i, with X_1 = d/dphi and X_2 = x d/dy - y d/dx."""
    cfg = GeometryConfig(0.5, (-1.0, 0.0, 1.5))
    for _ in range(20):
        x, y, z = rng.uniform(-2, 2, 3)
        w = symplectic_form(cfg, RealChartPoint(0.0, x, y, z))
        X1 = np.array([1.0, 0, 0, 0])
        X2 = np.array([0.0, -y, x, 0])
        dmu1 = np.array([0, 0, 0, -1.0])
        dmu2 = np.concatenate([[0.0], grad_mu2(cfg, x, y, z)])
        assert np.allclose(X1 @ w, -dmu1, atol=1e-12)
        assert np.allclose(X2 @ w, -dmu2, atol=1e-12)


def test_grad_mu2_matches_fd():
    cfg = GeometryConfig(-0.4, (0.0, 1.0))
    p = np.array([0.3, 0.5, -0.2])
    fd = fd_gradient(lambda q: moment_xyz(cfg, *q)[1], p, FDSettings(h=1e-4, order=4))
    assert np.allclose(grad_mu2(cfg, *p), fd, atol=1e-9)


def _coeffs(planes):
    return [(h.A, h.B, h.C) for h in planes]


def test_polytope_examples():
    assert _coeffs(moment_polytope(GeometryConfig(1, (0.0,)))) == [(0, 1, 0), (1, 1, 0)]
    assert _coeffs(moment_polytope(GeometryConfig(0, (0.0, 1.0)))) == [
        (0, 1, 0), (1, 1, 0), (2, 1, 1)]
    assert _coeffs(moment_polytope(GeometryConfig(0, (5.0,)))) == [(0, 1, 0), (1, 1, 5)]
    with pytest.raises(NegativeEpsilon):
        moment_polytope(GeometryConfig(-1, (0.0,)))
    with pytest.raises(ValueError):
        HalfPlane(0, 0, 1)


def test_lower_envelope_is_max_of_facets():
    cfg = GeometryConfig(0.3, (-1.0, 0.2, 2.0))
    planes = moment_polytope(cfg)
    for m in np.linspace(-4, 3, 71):
        # l_k = A mu1 + mu2 + C vanishes at mu2 = -(A mu1 + C)
        assert lower_envelope(cfg, m) == pytest.approx(max(-(p.A * m + p.C) for p in planes))


def test_neg_image_n1_examples():
    im = moment_image_neg_n1(1.0)
    assert im.lower_bound(0.0) == 0.0 and im.upper_bound(0.0) == 0.25
    assert im.lower_bound(0.99999) == 0.0
    assert im.upper_bound(0.99999) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(NoPositiveRoot):
        im.upper_bound(1.0)
    im2 = moment_image_neg_n1(2.0)
    assert im2.lower_bound(-1.0) == 1.0
    with pytest.raises(NoPositiveRoot):
        im2.upper_bound(-1.0)
    # inside the slab |mu1| < 1/a the displayed bound is (1 - a mu1)^2 / (4a)
    assert im2.upper_bound(-0.25) == pytest.approx(1.5**2 / 8)


def test_general_neg_image_matches_closed_form():
    gen, exact = moment_image_neg(GeometryConfig(-1, (0.0,))), moment_image_neg_n1(1.0)
    for m in np.linspace(-0.9, 0.9, 181):
        assert abs(gen.upper_bound(m) - exact.upper_bound(m)) < 1e-10
        assert gen.lower_bound(m) == exact.lower_bound(m)


def test_neg_image_lower_bound_asymptotics():
    cfg = GeometryConfig(-0.5, (0.0, 1.0, 3.0))
    im = moment_image_neg(cfg)
    assert im.lower_bound(10.0) == 0.0
    slope = im.lower_bound(-20.0) - im.lower_bound(-21.0)
    assert slope == pytest.approx(-cfg.n)


def test_membership_examples():
    flat = GeometryConfig(0, (0.0,))
    assert membership(flat, 1, 1) is Membership.INSIDE
    assert membership(flat, -1, 0.5) is Membership.OUTSIDE
    assert membership(flat, 1, 0) is Membership.BOUNDARY
    neg = GeometryConfig(-1, (0.0,))
    assert membership(neg, 0, 0.1) is Membership.INSIDE
    assert membership(neg, 0, 0.3) is Membership.OUTSIDE
    assert membership(neg, 2, 0.1) is Membership.OUTSIDE


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_image_of_positive_epsilon_lies_in_polytope(x, y, z):
    cfg = GeometryConfig(0.7, (-0.5, 0.0, 1.0))
    if min(math.sqrt(x * x + y * y + (z - c) ** 2) for c in cfg.centers) < 1e-6:
        return
    mu = moment_xyz(cfg, x, y, z)
    assert min(l(*mu) for l in moment_polytope(cfg)) >= -1e-9


def test_sample_boundary_positive():
    pieces = dict(sample_boundary(GeometryConfig(0, (0.0,)), (-2.0, 2.0), 5))
    assert set(pieces) == {"l0", "l1"}
    assert np.all(pieces["l0"][:, 1] == 0) and np.all(pieces["l0"][:, 0] >= 0)
    assert np.allclose(pieces["l1"][:, 1], -pieces["l1"][:, 0]) and np.all(pieces["l1"][:, 0] <= 0)
    two = sample_boundary(GeometryConfig(1, (0.0, 1.0)), (-3.0, 2.0), 2)
    assert [p for p, _ in two] == ["l0", "l1", "l2"]
    assert all(len(a) == 2 for _, a in two)
    with pytest.raises(ValueError):
        sample_boundary(GeometryConfig(0, (0.0,)), (-1, 1), 0)


def test_sample_boundary_negative_parabola():
    pieces = dict(sample_boundary(GeometryConfig(-1, (0.0,)), (-2.0, 2.0), 101))
    assert set(pieces) == {"l0", "l1", "upper0", "minus_upper"}
    m, u = pieces["upper0"][:, 0], pieces["upper0"][:, 1]
    assert m[0] == pytest.approx(-1.0) and m[-1] == pytest.approx(1.0)
    assert np.max(np.abs(u - (1 - m) ** 2 / 4)) < 1e-10


def test_convexity_examples():
    neg = GeometryConfig(-1, (0.0,))
    rep = convexity_experiment(neg, (-0.9, 0.9), 37)
    sd = rep["second_difference"]
    assert sd["negative"] == 0 and sd["positive"] == sd["count"] == 35
    assert sd["min"] == pytest.approx(0.5, abs=1e-6) and sd["max"] == pytest.approx(0.5, abs=1e-6)
    assert convexity_experiment(neg, (-0.9, 0.9), 1)["second_difference"]["count"] == 0
    rep2 = convexity_experiment(GeometryConfig(-1, (0.0, 1.0)), (-3, 2), 51)
    assert rep2["second_difference"]["count"] > 0 and len(rep2["intervals"]) >= 1
