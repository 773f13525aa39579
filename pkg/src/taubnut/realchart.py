"""Metric, complex structure, symplectic form and torus action in the chart (phi, x, y, z).

All tensors are component matrices in the ordered coordinate basis
(phi, x, y, z). ``J`` acts on tangent vectors, ``(J X)^k = J[k, l] X^l``;
its dual on covectors is ``xi -> xi @ J``.

The complex structure is written through the rational rules

    J*(dphi + alpha) = -V dz,    J*(dz) = (dphi + alpha) / V,
    J*(dx) = -dy,                J*(dy) = dx,

which agree with the orthonormal-coframe description where V > 0 and stay
valid where V < 0, so ``omega = g(J., .)`` holds on both phases and -g is
Kahler for (J, -omega) on the negative one.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .core import (DegenerateAtBoundary, GeometryConfig, RealChartPoint, check_domain,
                   normalize_angle)
from .fields import connection_sum, potential_xyz
from .numerics import FDSettings, fd_exterior_derivative, fd_partials

DEFAULT_BAND = 1e-9


def _q(point) -> np.ndarray:
    if isinstance(point, RealChartPoint):
        return point.as_array()
    return np.asarray(point, dtype=float)


def frame_data(config: GeometryConfig, q, band: float = DEFAULT_BAND):
    """V and the covector dphi + alpha at raw coordinates q = (phi, x, y, z)."""
    _, x, y, z = q
    check_domain(config, x, y, z)
    V = potential_xyz(config, x, y, z)
    if abs(V) <= band:
        raise DegenerateAtBoundary(f"|V| = {abs(V):.3e} within band {band}")
    s = connection_sum(config, x, y, z)
    e0 = np.array([1.0, 0.5 * y * s, -0.5 * x * s, 0.0])
    return V, e0


def metric_from_frame(V: float, e0: np.ndarray) -> np.ndarray:
    return np.outer(e0, e0) / V + V * np.diag([0.0, 1.0, 1.0, 1.0])


def metric_real(config: GeometryConfig, point, band: float = DEFAULT_BAND) -> np.ndarray:
    V, e0 = frame_data(config, _q(point), band)
    return metric_from_frame(V, e0)


def complex_structure(config: GeometryConfig, point, band: float = DEFAULT_BAND) -> np.ndarray:
    V, e0 = frame_data(config, _q(point), band)
    F = np.vstack([e0, np.eye(4)[1:]])  # rows: dphi+alpha, dx, dy, dz
    K = np.array([[0.0, 0.0, 0.0, -V],
                  [0.0, 0.0, -1.0, 0.0],
                  [0.0, 1.0, 0.0, 0.0],
                  [1.0 / V, 0.0, 0.0, 0.0]])
    return np.linalg.solve(F, K @ F)


def symplectic_form(config: GeometryConfig, point) -> np.ndarray:
    """omega = (dphi + alpha) ^ dz + V dx ^ dy as an antisymmetric matrix."""
    _, x, y, z = _q(point)
    check_domain(config, x, y, z)
    V = potential_xyz(config, x, y, z)
    s = connection_sum(config, x, y, z)
    e0 = np.array([1.0, 0.5 * y * s, -0.5 * x * s, 0.0])
    dz = np.array([0.0, 0.0, 0.0, 1.0])
    w = np.outer(e0, dz) - np.outer(dz, e0)
    w[1, 2] += V
    w[2, 1] -= V
    return w


def torus_act(theta1: float, theta2: float, point: RealChartPoint) -> RealChartPoint:
    c, s = math.cos(theta2), math.sin(theta2)
    return RealChartPoint(normalize_angle(point.phi + theta1),
                          point.x * c - point.y * s,
                          point.x * s + point.y * c,
                          point.z)


def torus_jacobian(theta2: float) -> np.ndarray:
    """Differential of the torus action in (phi, x, y, z) components."""
    c, s = math.cos(theta2), math.sin(theta2)
    D = np.eye(4)
    D[1:3, 1:3] = [[c, -s], [s, c]]
    return D


# --- curvature -------------------------------------------------------------

MetricFn = Callable[[np.ndarray], np.ndarray]


def christoffel(metric_fn: MetricFn, q, settings: FDSettings) -> np.ndarray:
    """Gamma[k, i, j] = Gamma^k_ij from finite-difference first derivatives of the metric."""
    q = np.asarray(q, dtype=float)
    g = metric_fn(q)
    dg = fd_partials(metric_fn, q, settings)  # dg[l, i, j] = d_l g_ij
    ginv = np.linalg.inv(g)
    # Gamma_{l i j} = 1/2 (d_i g_lj + d_j g_li - d_l g_ij)
    lower = 0.5 * (np.transpose(dg, (1, 0, 2)) + np.transpose(dg, (1, 2, 0)) - dg)
    return np.einsum("kl,lij->kij", ginv, lower)


def ricci_from_metric(metric_fn: MetricFn, q, settings: FDSettings = FDSettings(h=1e-3, order=4,
                                                                                richardson=True)
                      ) -> np.ndarray:
    """Ricci tensor via nested central differences (Christoffels, then their derivatives).

    Richardson extrapolation, when enabled, is applied once to the whole
    nested estimate with steps h and h/2.
    """
    q = np.asarray(q, dtype=float)
    inner = FDSettings(h=settings.h, order=settings.order, richardson=False,
                       scale_with_point=settings.scale_with_point)

    def once(s: FDSettings):
        gam = christoffel(metric_fn, q, s)
        dgam = fd_partials(lambda p: christoffel(metric_fn, p, s), q, s)  # dgam[m, k, i, j]
        term1 = np.einsum("kkij->ij", dgam)
        term2 = np.einsum("jkik->ij", dgam)
        term3 = np.einsum("kkl,lij->ij", gam, gam)
        term4 = np.einsum("kjl,lik->ij", gam, gam)
        return term1 - term2 + term3 - term4

    ric = once(inner)
    if settings.richardson:
        half = FDSettings(h=settings.h / 2, order=settings.order,
                          scale_with_point=settings.scale_with_point)
        k = 2 ** settings.order
        ric = (k * once(half) - ric) / (k - 1)
    return 0.5 * (ric + ric.T)


def ricci_tensor_fd(config: GeometryConfig, point,
                    settings: FDSettings = FDSettings(h=1e-3, order=4, richardson=True),
                    band: float = DEFAULT_BAND) -> np.ndarray:
    return ricci_from_metric(lambda q: metric_real(config, q, band), _q(point), settings)


def nijenhuis_of(J_fn: MetricFn, q, settings: FDSettings = FDSettings(h=1e-4, order=4)
                 ) -> np.ndarray:
    """N[k, i, j] = J^l_i d_l J^k_j - J^l_j d_l J^k_i - J^k_l (d_i J^l_j - d_j J^l_i)."""
    q = np.asarray(q, dtype=float)
    J = J_fn(q)
    dJ = fd_partials(J_fn, q, settings)  # dJ[l, k, j]
    a = np.einsum("li,lkj->kij", J, dJ)
    b = np.einsum("kl,ilj->kij", J, dJ)
    return a - np.transpose(a, (0, 2, 1)) - (b - np.transpose(b, (0, 2, 1)))


def nijenhuis(config: GeometryConfig, point,
              settings: FDSettings = FDSettings(h=1e-4, order=4)) -> np.ndarray:
    return nijenhuis_of(lambda p: complex_structure(config, p), _q(point), settings)


def d_symplectic(config: GeometryConfig, point,
                 settings: FDSettings = FDSettings(h=1e-3, order=4)) -> np.ndarray:
    return fd_exterior_derivative(lambda p: symplectic_form(config, p), _q(point), settings)


def signature(matrix: np.ndarray) -> tuple[int, int]:
    ev = np.linalg.eigvalsh(0.5 * (matrix + matrix.T))
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))
