import math

import numpy as np
import pytest

from taubnut.core import DegenerateAtBoundary, GeometryConfig, RealChartPoint
from taubnut.numerics import FDSettings
from taubnut.realchart import (complex_structure, d_symplectic, metric_real, nijenhuis,
                               nijenhuis_of,
                               ricci_from_metric, ricci_tensor_fd, signature, symplectic_form,
                               torus_act, torus_jacobian)

Q = RealChartPoint(0.3, 1.1, -0.4, 0.7)


def test_metric_examples():
    g = metric_real(GeometryConfig(0, (0.0,)), RealChartPoint(0, 0, 0, -1))
    assert np.allclose(g, np.diag([2.0, 0.5, 0.5, 0.5]))
    g = metric_real(GeometryConfig(1, (0.0,)), RealChartPoint(0, 0, 0, -1))
    assert np.allclose(g, np.eye(4))
    with pytest.raises(DegenerateAtBoundary):
        metric_real(GeometryConfig(-1, (0.0,)), RealChartPoint(0, 0.6, 0, 0.8))


def test_J_squares_to_minus_one(rng):
    for cfg in (GeometryConfig(0.5, (0.0, 1.0)), GeometryConfig(-1, (0.0,))):
        for _ in range(100):
            q = RealChartPoint(rng.uniform(0, 6), *rng.uniform(-2, 2, 3))
            J = complex_structure(cfg, q)
            assert np.allclose(J @ J, -np.eye(4), atol=1e-10)


def test_type_10_forms_are_eigencovectors():
    cfg = GeometryConfig(0.5, (0.0, 1.0))
    J = complex_structure(cfg, Q)
    g = metric_real(cfg, Q)
    V = g[1, 1]
    e0 = np.sqrt(V) * g[0] * np.sqrt(V)  # (dphi + alpha) = V g(d/dphi, .)
    dz = np.array([0, 0, 0, 1.0])
    dx, dy = np.eye(4)[1], np.eye(4)[2]
    for w in (dx + 1j * dy, e0 + 1j * V * dz):
        assert np.allclose(w @ J, 1j * w)


def test_J_on_dz_example():
    J = complex_structure(GeometryConfig(0, (0.0,)), RealChartPoint(0, 0, 0, -1))
    assert np.allclose(np.array([0, 0, 0, 1.0]) @ J, [2.0, 0, 0, 0])


def test_symplectic_examples(rng):
    cfg = GeometryConfig(0, (0.0,))
    w = symplectic_form(cfg, RealChartPoint(0, 0, 0, -1))
    exp = np.zeros((4, 4))
    exp[0, 3], exp[3, 0], exp[1, 2], exp[2, 1] = 1, -1, 0.5, -0.5
    assert np.allclose(w, exp)
    for cfg in (GeometryConfig(1, (0.0, 1.0)), GeometryConfig(-1, (0.0,))):
        for _ in range(50):
            q = RealChartPoint(rng.uniform(0, 6), *rng.uniform(-2, 2, 3))
            w = symplectic_form(cfg, q)
            assert np.array_equal(w, -w.T)
            J, g = complex_structure(cfg, q), metric_real(cfg, q)
            assert np.allclose(J.T @ g, w, atol=1e-12 * np.abs(g).max())


def test_torus_examples():
    p = torus_act(0, math.pi / 2, RealChartPoint(0, 1, 0, 0))
    assert (p.x, p.y) == pytest.approx((0, 1))
    p = torus_act(2 * math.pi, 0, Q)
    assert (p.phi, p.x, p.y, p.z) == pytest.approx((Q.phi, Q.x, Q.y, Q.z), abs=1e-14)
    p = torus_act(math.pi, math.pi, RealChartPoint(0, 1, 1, 5))
    assert (p.phi, p.x, p.y, p.z) == pytest.approx((math.pi, -1, -1, 5))


def test_torus_invariance_of_g_and_omega(rng):
    cfg = GeometryConfig(0.5, (-1.0, 0.0, 1.5))
    for _ in range(20):
        t1, t2 = rng.uniform(0, 2 * math.pi, 2)
        q = RealChartPoint(rng.uniform(0, 6), *rng.uniform(-2, 2, 3))
        D = torus_jacobian(t2)
        q2 = torus_act(t1, t2, q)
        assert np.allclose(D.T @ metric_real(cfg, q2) @ D, metric_real(cfg, q), atol=1e-11)
        assert np.allclose(D.T @ symplectic_form(cfg, q2) @ D, symplectic_form(cfg, q),
                           atol=1e-11)


@pytest.mark.parametrize("cfg", [GeometryConfig(0, (0.0,)), GeometryConfig(1, (0.0,)),
                                 GeometryConfig(0.5, (0.0, 1.0))])
def test_ricci_flat_at_reference_point(cfg):
    assert np.max(np.abs(ricci_tensor_fd(cfg, Q))) <= 1e-4


def test_ricci_of_euclidean_hook():
    ric = ricci_from_metric(lambda q: np.eye(4), np.zeros(4))
    assert np.max(np.abs(ric)) < 1e-10


def test_ricci_detects_curvature():
    # round 2-sphere in (theta, phi) times a flat plane: Ric = g on the sphere block
    def g(q):
        return np.diag([1.0, math.sin(q[0]) ** 2, 1.0, 1.0])

    q = np.array([1.0, 0.2, 0, 0])
    ric = ricci_from_metric(g, q)
    assert np.allclose(ric, np.diag([1.0, math.sin(1.0) ** 2, 0, 0]), atol=1e-6)


def test_nijenhuis_and_closedness():
    for cfg in (GeometryConfig(1, (0.0,)), GeometryConfig(-1, (0.0,))):
        q = RealChartPoint(0.3, 0.3, -0.2, 0.4)
        assert np.max(np.abs(nijenhuis(cfg, q))) < 1e-5
        assert np.max(np.abs(d_symplectic(cfg, q))) < 1e-6


def test_nijenhuis_detects_non_integrable_structure():
    J0 = np.zeros((4, 4))
    J0[0, 1], J0[1, 0], J0[2, 3], J0[3, 2] = -1, 1, -1, 1
    K = np.arange(16.0).reshape(4, 4) / 40.0

    def J(q):
        P = np.eye(4) + K * q[2] + K.T * q[0] ** 2
        return P @ J0 @ np.linalg.inv(P)

    q = np.array([0.4, 0.1, 0.2, 0.3])
    assert np.allclose(J(q) @ J(q), -np.eye(4))
    assert np.max(np.abs(nijenhuis_of(J, q))) > 1e-2
    assert np.max(np.abs(nijenhuis_of(lambda p: J0, q))) == 0.0


def test_signature_by_phase():
    cfg = GeometryConfig(-1, (0.0,))
    assert signature(metric_real(cfg, RealChartPoint(0, 0.3, 0.2, 0.1))) == (4, 0)
    assert signature(metric_real(cfg, RealChartPoint(0, 1.3, 0.2, 0.1))) == (0, 4)
