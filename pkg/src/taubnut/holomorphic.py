"""Holomorphic coordinates, the (alpha_i, beta_i) chart atlas and metrics in complex charts.

Hermitian coefficients follow ``g = h11 du du* + h12 du dv* + conj(h12) dv du* + h22 dv dv*``
with ``du du*`` the symmetric product, so ``|dz|^2 = dx^2 + dy^2``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import (ChartSingular, DegenerateAtBoundary, GeometryConfig, HolomorphicPoint, Phase,
                   PhaseLabel, PoleAt1PlusEpsR, RealChartPoint, Z_CHART, check_domain)
from .fields import axial_sum, connection_sum, minus_gap, potential_xyz
from .numerics import RootSolveSettings, SolverError, solve_monotone_root


class PhaseRequired(SolverError):
    pass


class AmbiguousRoot(SolverError):
    pass


@dataclass(frozen=True)
class HermitianForm2:
    h11: float
    h12: complex
    h22: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.h11, self.h12], [np.conj(self.h12), self.h22]], dtype=complex)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix())

    def is_positive_definite(self) -> bool:
        return self.h11 > 0 and self.h11 * self.h22 - abs(self.h12) ** 2 > 0

    def is_negative_definite(self) -> bool:
        return self.h11 < 0 and self.h11 * self.h22 - abs(self.h12) ** 2 > 0

    def to_plain(self, u: complex, v: complex) -> "HermitianForm2":
        """Convert from frames (du/u, dv/v) to (du, dv)."""
        if u == 0 or v == 0:
            raise ChartSingular("plain-frame conversion needs nonzero coordinates")
        return HermitianForm2(self.h11 / abs(u) ** 2, self.h12 / (u * np.conj(v)),
                              self.h22 / abs(v) ** 2)

    def pullback(self, w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
        """Real symmetric tensor from complex covectors w1, w2 for the two frames."""
        M = (self.h11 * np.outer(w1, np.conj(w1)) + self.h12 * np.outer(w1, np.conj(w2))
             + np.conj(self.h12) * np.outer(w2, np.conj(w1))
             + self.h22 * np.outer(w2, np.conj(w2)))
        G = M.real
        return 0.5 * (G + G.T)

    def kahler_pullback(self, w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
        """(i/2) sum h_ab w_a ^ conj(w_b) as a real antisymmetric matrix."""
        W = [w1, w2]
        H = self.matrix()
        out = np.zeros((w1.size, w1.size), dtype=complex)
        for a in range(2):
            for b in range(2):
                out += H[a, b] * (np.outer(W[a], np.conj(W[b])) - np.outer(np.conj(W[b]), W[a]))
        return (0.5j * out).real


# --- coordinates ----------------------------------------------------------------

def to_z_coords(config: GeometryConfig, point: RealChartPoint) -> tuple[complex, complex]:
    """z1 = prod_j (r_j - (z - c_j))^(1/2) exp(-eps z / 2 + i phi),  z2 = x + i y."""
    x, y, z = point.x, point.y, point.z
    check_domain(config, x, y, z)
    p = x * x + y * y
    log_mod = -0.5 * config.epsilon * z
    for c in config.centers:
        d = z - c
        gap = minus_gap(math.sqrt(p + d * d), d, p)
        if gap <= 0:
            raise ChartSingular("z1 vanishes on the excluded half-line")
        log_mod += 0.5 * math.log(gap)
    return cmath.rect(math.exp(log_mod), point.phi), complex(x, y)


def z_to_ab(z1: complex, z2: complex) -> tuple[complex, complex]:
    if z1 == 0:
        raise ChartSingular("z1 = 0 has no (alpha, beta) image")
    return z2 / z1, z1


def ab_to_z(alpha: complex, beta: complex) -> tuple[complex, complex]:
    return beta, alpha * beta


def chart_transition(i: int, alpha, beta):
    """(alpha_i, beta_i) -> (alpha_{i+1}, beta_{i+1}) = (alpha^2 beta, 1/alpha).

    Works for any field type (complex, Fraction, sympy numbers).
    """
    if alpha == 0:
        raise ChartSingular(f"transition out of chart {i} needs alpha_{i} != 0")
    return alpha * alpha * beta, 1 / alpha


def chart_transition_inverse(i: int, alpha, beta):
    """(alpha_{i+1}, beta_{i+1}) -> (alpha_i, beta_i)."""
    if beta == 0:
        raise ChartSingular(f"chart {i + 1} point with beta = 0 is not in chart {i}")
    a = 1 / beta
    return a, alpha / (a * a)


def to_chart(target: int, alpha1, beta1):
    alpha, beta = alpha1, beta1
    for i in range(1, target):
        alpha, beta = chart_transition(i, alpha, beta)
    return alpha, beta


def chart_monomials(i: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Exponents (of alpha_1, beta_1) of the monomials alpha_i and beta_i."""
    a, b = (1, 0), (0, 1)
    for _ in range(1, i):
        a, b = (2 * a[0] + b[0], 2 * a[1] + b[1]), (-a[0], -a[1])
    return a, b


def z1_from_chart(i: int, alpha, beta):
    """z1 = alpha_i^(i-1) beta_i^i, the same function on every chart."""
    return alpha ** (i - 1) * beta**i


def holomorphic_point(config: GeometryConfig, point: RealChartPoint,
                      chart: int | str = 1) -> HolomorphicPoint:
    z1, z2 = to_z_coords(config, point)
    if chart == Z_CHART:
        return HolomorphicPoint(Z_CHART, z2, z1)
    a, b = to_chart(chart, *z_to_ab(z1, z2))
    return HolomorphicPoint(chart, a, b)


# --- log-frame covectors in the real chart ---------------------------------------

def log_frames(config: GeometryConfig, point: RealChartPoint) -> tuple[np.ndarray, np.ndarray]:
    """Components of dz1/z1 and dz2/z2 in the basis (dphi, dx, dy, dz)."""
    x, y, z = point.x, point.y, point.z
    check_domain(config, x, y, z)
    s = connection_sum(config, x, y, z)
    V = potential_xyz(config, x, y, z)
    w1 = np.array([1j, 0.5 * x * s, 0.5 * y * s, -V], dtype=complex)
    zz = complex(x, y)
    if zz == 0:
        raise ChartSingular("dz2/z2 undefined on the axis")
    w2 = np.array([0.0, 1.0 / zz, 1j / zz, 0.0], dtype=complex)
    return w1, w2


def _coefficient_data(config, point, band):
    x, y, z = point.x, point.y, point.z
    check_domain(config, x, y, z)
    V = potential_xyz(config, x, y, z)
    if abs(V) <= band:
        raise DegenerateAtBoundary(f"|V| = {abs(V):.3e} within band {band}")
    return V, x * x + y * y, axial_sum(config, x, y, z)


def metric_z_chart(config: GeometryConfig, point: RealChartPoint,
                   band: float = 1e-9) -> HermitianForm2:
    """Coefficients in the frames dz1/z1, dz2/z2 (use ``to_plain`` for dz1, dz2)."""
    V, rho2, S = _coefficient_data(config, point, band)
    return HermitianForm2(1.0 / V, -S / (2.0 * V), V * rho2 + S * S / (4.0 * V))


def metric_ab_chart(config: GeometryConfig, point: RealChartPoint,
                    band: float = 1e-9) -> HermitianForm2:
    """Coefficients in the frames dalpha_1/alpha_1, dbeta_1/beta_1."""
    V, rho2, S = _coefficient_data(config, point, band)
    q = S * S / (4.0 * V)
    return HermitianForm2(V * rho2 + q, V * rho2 - S / (2.0 * V) + q,
                          1.0 / V + V * rho2 - S / V + q)


def ab_log_frames(config: GeometryConfig, point: RealChartPoint) -> tuple[np.ndarray, np.ndarray]:
    """dalpha/alpha = dz2/z2 - dz1/z1 and dbeta/beta = dz1/z1 in real components."""
    w1, w2 = log_frames(config, point)
    return w2 - w1, w1


def metric_z_chart_real(config: GeometryConfig, point: RealChartPoint) -> np.ndarray:
    return metric_z_chart(config, point).pullback(*log_frames(config, point))


def kahler_form_z_chart_real(config: GeometryConfig, point: RealChartPoint) -> np.ndarray:
    return metric_z_chart(config, point).kahler_pullback(*log_frames(config, point))


# --- n = 1: recovering (z, r) from (alpha, beta) -------------------------------

@dataclass(frozen=True)
class ABSolution:
    z: float
    r: float
    phase: Phase


def _single_center(config: GeometryConfig):
    if config.n != 1 or config.centers[0] != 0.0:
        raise ValueError("this operation needs one center at the origin")


def _gap(P: float, z: float) -> float:
    r = math.sqrt(P + z * z)
    return P / (r + z) if z > 0 else r - z


def _branches(epsilon: float, P: float):
    """Monotone branches of f(z) = (r - z) e^{-eps z}: (lo, hi, phase, increasing)."""
    if epsilon >= 0:
        return [(-math.inf, math.inf, Phase.PLUS, False)]
    R = 1.0 / -epsilon
    if P >= R * R:
        return [(-math.inf, math.inf, Phase.MINUS, True)]
    zs = math.sqrt(R * R - P)
    return [(-zs, zs, Phase.PLUS, False),
            (-math.inf, -zs, Phase.MINUS, True),
            (zs, math.inf, Phase.MINUS, True)]


def _solve_branch(epsilon, P, B, lo, hi, settings):
    """Root of log f(z) - log B on one monotone branch, or None if it has none."""
    logB = math.log(B)

    def g(z):
        gap = _gap(P, z)
        if gap <= 0:
            return -math.inf
        return math.log(gap) - epsilon * z - logB

    if P == 0:
        # f vanishes for z >= 0 when alpha = 0: the root is on the negative axis
        hi = min(hi, -1e-300)
        if lo >= hi:
            return None
    finite_lo, finite_hi = math.isfinite(lo), math.isfinite(hi)
    if finite_lo and finite_hi:
        glo, ghi = g(lo), g(hi)
        if glo == 0:
            return lo
        if ghi == 0:
            return hi
        if (glo > 0) == (ghi > 0):
            return None
        return solve_monotone_root(g, lo, hi, settings, limits=(lo, hi))
    if finite_lo:
        # [lo, inf): increasing up to +inf
        if g(lo) >= 0:
            return lo if g(lo) == 0 else None
        return solve_monotone_root(g, lo, lo + 1.0, settings, limits=(lo, math.inf))
    if finite_hi:
        # (-inf, hi]: increasing from -inf
        if g(hi) <= 0:
            return hi if g(hi) == 0 else None
        return solve_monotone_root(g, hi - 1.0, hi, settings, limits=(-math.inf, hi))
    z0 = 0.5 * (P / B - B)  # epsilon = 0 value (|alpha|^2 - |beta|^2) / 2
    a, b = z0 - 1.0, z0 + 1.0
    if P == 0:
        a, b = min(a, -2.0), -1e-300
    return solve_monotone_root(g, a, b, settings)


def solve_all_roots(config: GeometryConfig, alpha: complex, beta: complex,
                    settings: RootSolveSettings = RootSolveSettings(abs_tol=1e-18)
                    ) -> list[ABSolution]:
    """Every z with (r - z) e^{-eps z} = |beta|^2 and r = sqrt(|alpha beta|^2 + z^2)."""
    _single_center(config)
    P = abs(alpha) ** 2 * abs(beta) ** 2
    B = abs(beta) ** 2
    if B == 0:
        raise ChartSingular("beta = 0 lies over the excluded half-line")
    eps = config.epsilon
    out = []
    for lo, hi, phase, _ in _branches(eps, P):
        z = _solve_branch(eps, P, B, lo, hi, settings)
        if z is not None:
            out.append(ABSolution(z, math.sqrt(P + z * z), phase))
    return out


def solve_z_from_ab(config: GeometryConfig, alpha: complex, beta: complex,
                    phase: Phase | str | None = None, side: str | None = None,
                    settings: RootSolveSettings = RootSolveSettings(abs_tol=1e-18)
                    ) -> tuple[float, float]:
    """Solve (sqrt(|alpha|^2 |beta|^2 + z^2) - z) e^{-eps z} = |beta|^2 for z; return (z, r).

    For epsilon < 0 the phase (PLUS or MINUS) must be given. On the negative
    phase two roots can coexist (above and below the positive-phase slab);
    ``side`` = "upper" or "lower" then picks one.
    """
    _single_center(config)
    if isinstance(phase, str):
        phase = Phase(phase.lower())
    eps = config.epsilon
    P = abs(alpha) ** 2 * abs(beta) ** 2
    B = abs(beta) ** 2
    if B == 0:
        raise ChartSingular("beta = 0 lies over the excluded half-line")
    if eps == 0:
        A = abs(alpha) ** 2
        return 0.5 * (A - B), 0.5 * (A + B)
    if eps < 0 and phase is None:
        raise PhaseRequired("epsilon < 0: specify the phase region (plus or minus)")
    if eps > 0 and phase is Phase.MINUS:
        raise SolverError("no negative phase for epsilon > 0")
    roots = [s for s in solve_all_roots(config, alpha, beta, settings)
             if phase is None or s.phase is phase]
    if side is not None:
        zs = math.sqrt(max(1.0 / eps**2 - P, 0.0)) if eps < 0 else 0.0
        roots = [s for s in roots if (s.z >= zs if side == "upper" else s.z <= -zs)]
    if not roots:
        from .numerics import NoBracket
        raise NoBracket(f"no root on the requested branch for |alpha|={abs(alpha)}, "
                        f"|beta|={abs(beta)}")
    if len(roots) > 1:
        raise AmbiguousRoot("two roots on the negative phase; pass side='upper' or 'lower'")
    return roots[0].z, roots[0].r


def real_point_from_ab(config: GeometryConfig, alpha: complex, beta: complex,
                       phase: Phase | str | None = None, side: str | None = None
                       ) -> RealChartPoint:
    z, _ = solve_z_from_ab(config, alpha, beta, phase, side)
    z2 = alpha * beta
    return RealChartPoint(cmath.phase(beta), z2.real, z2.imag, z)


def series_z_r(alpha: complex, beta: complex, epsilon: float,
               order: int = 2) -> tuple[float, float]:
    """Expansion of (z, r) in epsilon to the given order (at most 2)."""
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    A, B = abs(alpha) ** 2, abs(beta) ** 2
    zc = [0.5, -(A + B) / 4.0, (3 * A * A + 2 * A * B + 3 * B * B) / 16.0]
    rc = [0.0, -0.25, 3.0 * (A + B) / 16.0]
    z = (A - B) * sum(zc[k] * epsilon**k for k in range(order + 1))
    r = 0.5 * (A + B) + (A - B) ** 2 * sum(rc[k] * epsilon**k for k in range(order + 1))
    return z, r


def metric_n1(epsilon: float, alpha: complex, beta: complex,
              phase: Phase | str | None = None, side: str | None = None,
              band: float = 1e-12) -> HermitianForm2:
    """One-center metric in the plain frames dalpha, dbeta.

    h_aa = (e^2 r^2 + 2 e r - e^2 r z + 2 - 2 e z) / (2 (1 + e r)) exp(-e z)
    h_ab = e (2 + e r) / (2 (1 + e r)) conj(alpha) beta
    h_bb = (e^2 r^2 + 2 e r + e^2 r z + 2 + 2 e z) / (2 (1 + e r)) exp(e z)
    """
    config = GeometryConfig(epsilon, (0.0,))
    if epsilon == 0:
        return HermitianForm2(1.0, 0j, 1.0)
    z, r = solve_z_from_ab(config, alpha, beta, phase, side)
    return metric_n1_at(epsilon, alpha, beta, z, r, band)


def metric_n1_at(epsilon: float, alpha: complex, beta: complex, z: float, r: float,
                 band: float = 1e-12) -> HermitianForm2:
    e = epsilon
    den = 1.0 + e * r
    if abs(den) < band:
        raise PoleAt1PlusEpsR("1 + eps r vanishes on the phase boundary")
    haa = (e * e * r * r + 2 * e * r - e * e * r * z + 2 - 2 * e * z) / (2 * den) * math.exp(-e * z)
    hbb = (e * e * r * r + 2 * e * r + e * e * r * z + 2 + 2 * e * z) / (2 * den) * math.exp(e * z)
    cross = e * (2 + e * r) / (2 * den)
    return HermitianForm2(haa, cross * np.conj(alpha) * beta, hbb)


def phase_region_ab(epsilon: float, alpha: complex, beta: complex,
                    delta: float = 1e-9) -> dict:
    """Phase of the (alpha, beta) chart point for epsilon = -a < 0, by the sign of V.

    A chart point can have up to three preimages; the positive-phase one is
    reported when it exists. ``abs_ab`` is returned together with both
    candidate thresholds a and 1/a for comparison.
    """
    if not epsilon < 0:
        raise ValueError("phase_region_ab needs epsilon < 0")
    config = GeometryConfig(epsilon, (0.0,))
    roots = solve_all_roots(config, alpha, beta)
    if not roots:
        raise SolverError("no preimage found")
    plus = [s for s in roots if s.phase is Phase.PLUS]
    sol = plus[0] if plus else roots[0]
    V = 0.5 * epsilon + 0.5 / sol.r
    a = -epsilon
    ab = abs(alpha * beta)
    return {
        "label": PhaseLabel.from_value(V, delta),
        "z": sol.z,
        "r": sol.r,
        "V": V,
        "abs_ab": ab,
        "abs_ab_below_a": ab < a,
        "abs_ab_below_inv_a": ab < 1.0 / a,
        "preimages": len(roots),
    }
