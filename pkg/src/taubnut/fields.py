"""Scalar and one-form building blocks: r_j, V, the connection alpha, p_a(z) and phases."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (DELTA_DOM, GeometryConfig, Phase, PhaseLabel, RealChartPoint,
                   TooCloseToAxisCut, check_domain)
from .numerics import RootSolveSettings, SolverError, solve_monotone_root


class NoPositiveRoot(SolverError):
    """V_{-a}(p=0; z) <= 0, so the whole slice at height z lies in U_-.

    The conventional value of p_a there is 0, available as ``exc.p``.
    """

    p = 0.0


@dataclass(frozen=True)
class PotentialValue:
    V: float
    per_center_r: tuple[float, ...]


@dataclass(frozen=True)
class ConnectionForm:
    a_x: float
    a_y: float

    def as_array(self) -> np.ndarray:
        """Components in the (dx, dy, dz) basis."""
        return np.array([self.a_x, self.a_y, 0.0])


def _xyz(point):
    if isinstance(point, RealChartPoint):
        return point.x, point.y, point.z
    x, y, z = point
    return float(x), float(y), float(z)


def r_values(config: GeometryConfig, x: float, y: float, z: float) -> list[float]:
    rho2 = x * x + y * y
    return [math.sqrt(rho2 + (z - c) ** 2) for c in config.centers]


def minus_gap(r: float, d: float, rho2: float) -> float:
    """r - d for r = sqrt(rho2 + d^2), without cancellation when d > 0."""
    if d <= 0:
        return r - d
    return rho2 / (r + d)


def plus_gap(r: float, d: float, rho2: float) -> float:
    """r + d, accurate when d < 0."""
    if d >= 0:
        return r + d
    return rho2 / (r - d)


def eval_r(config: GeometryConfig, point) -> list[float]:
    x, y, z = _xyz(point)
    check_domain(config, x, y, z, cut=False)
    return r_values(config, x, y, z)


def potential_xyz(config: GeometryConfig, x: float, y: float, z: float) -> float:
    return 0.5 * config.epsilon + 0.5 * sum(1.0 / r for r in r_values(config, x, y, z))


def eval_potential(config: GeometryConfig, point) -> PotentialValue:
    rs = eval_r(config, point)
    V = 0.5 * config.epsilon + 0.5 * sum(1.0 / r for r in rs)
    return PotentialValue(V, tuple(rs))


def grad_potential(config: GeometryConfig, point) -> np.ndarray:
    """Analytic gradient of V in (x, y, z)."""
    x, y, z = _xyz(point)
    check_domain(config, x, y, z, cut=False)
    g = np.zeros(3)
    for c in config.centers:
        v = np.array([x, y, z - c])
        g -= 0.5 * v / np.linalg.norm(v) ** 3
    return g


def connection_sum(config: GeometryConfig, x: float, y: float, z: float,
                   delta: float = DELTA_DOM) -> float:
    """sum_j 1 / (r_j (r_j - (z - c_j))), the common factor of alpha and G."""
    rho2 = x * x + y * y
    total = 0.0
    for c in config.centers:
        d = z - c
        r = math.sqrt(rho2 + d * d)
        gap = minus_gap(r, d, rho2)
        if gap < delta:
            raise TooCloseToAxisCut(f"r - (z - c) = {gap:.3e} below guard near center {c}")
        total += 1.0 / (r * gap)
    return total


def eval_alpha(config: GeometryConfig, point, delta: float = DELTA_DOM) -> ConnectionForm:
    x, y, z = _xyz(point)
    check_domain(config, x, y, z, delta=delta, cut=False)
    s = connection_sum(config, x, y, z, delta)
    return ConnectionForm(0.5 * y * s, -0.5 * x * s)


def axial_sum(config: GeometryConfig, x: float, y: float, z: float) -> float:
    """S = sum_j (r_j + z - c_j) / r_j, which equals rho^2 times ``connection_sum``."""
    rho2 = x * x + y * y
    total = 0.0
    for c in config.centers:
        d = z - c
        r = math.sqrt(rho2 + d * d)
        total += plus_gap(r, d, rho2) / r
    return total


def potential_on_slice(config: GeometryConfig, p: float, z: float) -> float:
    """V as a function of p = rho^2 at fixed height z."""
    return 0.5 * config.epsilon + 0.5 * sum(1.0 / math.sqrt(p + (z - c) ** 2)
                                            for c in config.centers)


def solve_pa(config: GeometryConfig, z: float,
             settings: RootSolveSettings = RootSolveSettings(abs_tol=1e-15)) -> float:
    """The rho^2 at which V_{-a} vanishes on the slice at height z (epsilon = -a < 0).

    V decreases strictly in p, so the root is unique when V(0; z) > 0.
    """
    if not config.epsilon < 0:
        raise ValueError("solve_pa needs epsilon < 0")

    def v(p):
        return potential_on_slice(config, p, z)

    if min(abs(z - c) for c in config.centers) == 0.0:
        v0 = math.inf
    else:
        v0 = v(0.0)
    if v0 <= 0.0:
        raise NoPositiveRoot(f"V(0; z={z}) = {v0} <= 0: slice lies in U_-")
    hi = max((z - c) ** 2 for c in config.centers) + 1.0
    while v(hi) > 0.0:
        hi *= 2.0
    lo = 0.0
    if v0 == math.inf:
        lo = min(hi * 1e-300, 1e-300)
    return solve_monotone_root(v, lo, hi, settings, limits=(0.0, math.inf))


def classify_phase(config: GeometryConfig, point, delta: float = 1e-9) -> PhaseLabel:
    return PhaseLabel.from_value(eval_potential(config, point).V, delta)


def phase_of_value(v: float, delta: float = 1e-9) -> Phase:
    return PhaseLabel.from_value(v, delta).phase
