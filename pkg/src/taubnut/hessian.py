"""Hessian geometry in action-angle coordinates.

The metric splits as ``g = sum 1/2 G_ij dmu_i dmu_j + 2 G^ij dtheta_i dtheta_j``
and ``G`` is the mu-Hessian of the complex potential psi. For epsilon != 0
psi carries the term ``(eps/4) rho^2 (log rho^2 + 1)``; without it the
Hessian identity fails (see ``complex_potential(..., rho_log_term=False)``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (DELTA_DOM, DegenerateAtBoundary, GeometryConfig, LogDomain,
                   NegativeDiscriminant, OutsideImage, RealChartPoint, TooCloseToAxisCut,
                   check_domain)
from .fields import NoPositiveRoot, connection_sum, minus_gap, plus_gap, potential_xyz, solve_pa
from .moment import mu2_on_slice
from .numerics import FDSettings, RootSolveSettings, fd_hessian, solve_monotone_root


@dataclass(frozen=True)
class SymForm2:
    g11: float
    g12: float
    g22: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.g11, self.g12], [self.g12, self.g22]])


@dataclass(frozen=True)
class PotentialPair:
    psi: float
    psi_dual: float
    C1: float = 0.0
    C2: float = 0.0


def _cyl(point) -> tuple[float, float, float]:
    """(x, y, z) from a RealChartPoint or a (rho, z) pair."""
    if isinstance(point, RealChartPoint):
        return point.x, point.y, point.z
    if len(point) == 2:
        rho, z = point
        return float(rho), 0.0, float(z)
    x, y, z = point
    return float(x), float(y), float(z)


def symplectic_to_cylindrical(config: GeometryConfig, mu1: float, mu2: float,
                              settings: RootSolveSettings = RootSolveSettings(abs_tol=1e-16)
                              ) -> tuple[float, float]:
    """Invert the moment map on the positive phase: returns (rho, z).

    mu2 is strictly increasing in p = rho^2 wherever V > 0 (its p-derivative
    is V/2), so p is found by a bracketed solve on [0, p_max) with p_max
    doubling, or on [0, p_a(z)] when epsilon < 0.
    """
    z = -mu1

    def f(p):
        return mu2_on_slice(config, p, z) - mu2

    f0 = f(0.0)
    if f0 > 0:
        raise OutsideImage(f"mu2={mu2} below the image at mu1={mu1}")
    if f0 == 0:
        return 0.0, z
    if config.epsilon < 0:
        try:
            pmax = solve_pa(config, z)
        except NoPositiveRoot:
            raise OutsideImage(f"no positive phase at mu1={mu1}") from None
        if f(pmax) <= 0:
            raise OutsideImage(f"mu2={mu2} above the positive-phase image at mu1={mu1}")
    else:
        pmax = max(1.0, 4.0 * abs(mu2) + 4.0 * z * z)
        while f(pmax) < 0:
            pmax *= 2.0
            if pmax > 1e300:
                raise OutsideImage("could not bracket mu2")
    p = solve_monotone_root(f, 0.0, pmax, settings, limits=(0.0, pmax))
    return math.sqrt(p), z


def _check_G_point(config, x, y, z, band):
    check_domain(config, x, y, z)
    rho2 = x * x + y * y
    if math.sqrt(rho2) < DELTA_DOM:
        raise TooCloseToAxisCut("G is singular on the axis rho = 0 (chart degeneracy)")
    V = potential_xyz(config, x, y, z)
    if V <= band:
        raise DegenerateAtBoundary(f"V = {V:.3e} not above band {band}")
    return V, rho2


def G_matrix(config: GeometryConfig, point, band: float = 1e-9) -> SymForm2:
    x, y, z = _cyl(point)
    V, rho2 = _check_G_point(config, x, y, z, band)
    s = connection_sum(config, x, y, z)
    return SymForm2(2 * V + rho2 / (2 * V) * s * s, s / V, 2 / (V * rho2))


def G_inverse(config: GeometryConfig, point, band: float = 1e-9) -> SymForm2:
    x, y, z = _cyl(point)
    V, rho2 = _check_G_point(config, x, y, z, band)
    t = rho2 * connection_sum(config, x, y, z)
    return SymForm2(1 / (2 * V), -t / (4 * V), V * rho2 / 2 + t * t / (8 * V))


def _xlogx(v: float) -> float:
    if v <= DELTA_DOM:
        raise LogDomain(f"log argument {v:.3e} not above guard")
    return v * math.log(v)


def complex_potential(config: GeometryConfig, point, C1: float = 0.0, C2: float = 0.0,
                      rho_log_term: bool = True) -> float:
    """psi = 1/2 sum_j [(r+d) log(r+d) + (r-d) log(r-d)] + (eps/4) p (log p + 1)
    + (eps/2) z^2 + C1 mu1 + C2 mu2, with d = z - c_j and p = rho^2."""
    x, y, z = _cyl(point)
    check_domain(config, x, y, z, cut=False)
    p = x * x + y * y
    eps = config.epsilon
    total = 0.0
    for c in config.centers:
        d = z - c
        r = math.sqrt(p + d * d)
        total += _xlogx(plus_gap(r, d, p)) + _xlogx(minus_gap(r, d, p))
    psi = 0.5 * total + 0.5 * eps * z * z
    if rho_log_term and eps != 0.0:
        psi += 0.25 * eps * (_xlogx(p) + p)
    mu1, mu2 = -z, mu2_on_slice(config, p, z)
    return psi + C1 * mu1 + C2 * mu2


def kahler_potential(config: GeometryConfig, point, C1: float = 0.0, C2: float = 0.0) -> float:
    """psi_dual = -sum_j c_j log(r_j - (z - c_j)) + (eps/2) z^2 + C1 mu1 + C2 mu2."""
    x, y, z = _cyl(point)
    check_domain(config, x, y, z, cut=False)
    p = x * x + y * y
    total = 0.0
    for c in config.centers:
        d = z - c
        gap = minus_gap(math.sqrt(p + d * d), d, p)
        if gap <= DELTA_DOM:
            raise LogDomain(f"log argument {gap:.3e} not above guard")
        total -= c * math.log(gap)
    return total + 0.5 * config.epsilon * z * z + C1 * (-z) + C2 * mu2_on_slice(config, p, z)


def potentials(config: GeometryConfig, point, C1: float = 0.0, C2: float = 0.0) -> PotentialPair:
    return PotentialPair(complex_potential(config, point, C1, C2),
                         kahler_potential(config, point, C1, C2), C1, C2)


def psi_of_mu(config: GeometryConfig, mu, C1: float = 0.0, C2: float = 0.0,
              rho_log_term: bool = True) -> float:
    rho, z = symplectic_to_cylindrical(config, float(mu[0]), float(mu[1]))
    return complex_potential(config, (rho, z), C1, C2, rho_log_term)


HESSIAN_FD = FDSettings(h=1e-4, order=2, richardson=True)


def hessian_check(config: GeometryConfig, mu1: float, mu2: float,
                  settings: FDSettings = HESSIAN_FD, C1: float = 0.0, C2: float = 0.0,
                  rho_log_term: bool = True) -> np.ndarray:
    """Finite-difference mu-Hessian of psi minus G at the preimage of (mu1, mu2)."""
    H = fd_hessian(lambda m: psi_of_mu(config, m, C1, C2, rho_log_term),
                   np.array([mu1, mu2]), settings)
    rho, z = symplectic_to_cylindrical(config, mu1, mu2)
    return H - G_matrix(config, (rho, z)).matrix()


# --- n = 1 closed forms ------------------------------------------------------

def _n1_discriminant(epsilon: float, mu2: float, z: float) -> float:
    disc = (1.0 - epsilon * z) ** 2 + 4.0 * epsilon * mu2
    if disc < 0:
        raise NegativeDiscriminant(f"(1 - eps z)^2 + 4 eps mu2 = {disc:.3e} < 0")
    return disc


def n1_closed_forms(epsilon: float, mu2: float, z: float) -> tuple[float, float]:
    """(rho^2, r) on the branch continuous at epsilon = 0, for one center at the origin.

    Solves (eps/2) rho^2 + r + z = 2 mu2 with rho^2 = r^2 - z^2.
    """
    if epsilon == 0:
        raise ValueError("closed forms need epsilon != 0; use r = 2 mu2 - z")
    s = math.sqrt(_n1_discriminant(epsilon, mu2, z))
    # r = (s - 1)/eps, written without cancellation for small eps
    num = 4.0 * mu2 - 2.0 * z + epsilon * z * z
    r = num / (s + 1.0)
    rho_sq = (r - z) * (r + z)
    if rho_sq < 0:
        if rho_sq < -1e-12 * max(1.0, z * z):
            raise OutsideImage(f"(mu2, z) = ({mu2}, {z}) is not in the one-center image")
        rho_sq = 0.0
    return rho_sq, r


def n1_closed_forms_displayed(epsilon: float, mu2: float, z: float) -> tuple[float, float]:
    """The closed forms obtained from (eps/4) rho^2 + r + z = 2 mu2.

    Kept for comparison: they do not invert the moment map unless epsilon = 0.
    """
    disc = 8 * epsilon * mu2 + (2 - epsilon * z) ** 2
    if disc < 0:
        raise NegativeDiscriminant("negative discriminant")
    s = math.sqrt(disc)
    rho_sq = -4 * (-2 * epsilon * mu2 - (2 - epsilon * z) + s) / epsilon**2
    r = (-2 + s) / epsilon
    return rho_sq, r


def n1_complex_potential(epsilon: float, mu1: float, mu2: float, C1: float = 0.0,
                         C2: float = 0.0) -> float:
    """psi for one center at the origin, in closed form in (mu1, mu2)."""
    z = -mu1
    rho_sq, r = n1_closed_forms(epsilon, mu2, z)
    plus, minus = r + z, r - z
    if plus <= DELTA_DOM or minus <= DELTA_DOM:
        raise LogDomain("log argument not above guard")
    psi = 0.5 * (plus * math.log(plus) + minus * math.log(minus))
    if rho_sq > 0:
        psi += 0.25 * epsilon * rho_sq * (math.log(rho_sq) + 1.0)
    return psi + C1 * mu1 + C2 * mu2 + 0.5 * epsilon * mu1 * mu1
