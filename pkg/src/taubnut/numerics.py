"""Shared numerical kernels: bracketed root finding, finite differences, exterior derivatives.

Forms on an n-dimensional chart are represented by their fully antisymmetric
component arrays: a k-form is an array of shape ``(n,) * k`` with
``w[i, j] = w(e_i, e_j)``, so ``dx ^ dy`` has ``w[0, 1] = 1`` and ``w[1, 0] = -1``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import DomainError, StencilOutOfDomain, TaubNutError

EPS = np.finfo(float).eps


class SolverError(TaubNutError, ArithmeticError):
    pass


class NoBracket(SolverError):
    pass


class NoConvergence(SolverError):
    pass


@dataclass(frozen=True)
class RootSolveSettings:
    abs_tol: float = 1e-12
    max_iter: int = 200
    bracket_expansion: float = 2.0
    max_expansions: int = 60

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.bracket_expansion > 1:
            raise ValueError("bracket_expansion must exceed 1")


@dataclass(frozen=True)
class FDSettings:
    h: float = 1e-4
    order: int = 2
    richardson: bool = False
    scale_with_point: bool = True

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("step h must be positive")
        if self.order not in (2, 4):
            raise ValueError("order must be 2 or 4")

    def step(self, point) -> float:
        if not self.scale_with_point:
            return self.h
        return self.h * max(1.0, float(np.max(np.abs(point))))


def _sign(v: float) -> int:
    return int(v > 0) - int(v < 0)


def solve_monotone_root(f: Callable[[float], float], lo: float, hi: float,
                        settings: RootSolveSettings = RootSolveSettings(),
                        limits: tuple[float, float] = (-math.inf, math.inf)) -> float:
    """Root of a continuous strictly monotone ``f`` on ``[lo, hi]``.

    If ``f(lo)`` and ``f(hi)`` share a sign the bracket is grown geometrically
    toward the endpoint with the smaller ``|f|``, never past ``limits``.
    Iterates Illinois-weighted regula falsi, forcing a bisection step every
    third iteration (or whenever the secant point is unusable) so the bracket
    width is guaranteed to shrink. Stops once the bracket is narrower than
    ``abs_tol`` plus a few ulps of the iterate.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    expansions = 0
    while _sign(flo) == _sign(fhi):
        if expansions >= settings.max_expansions:
            raise NoBracket(f"no sign change on [{lo}, {hi}] after expansion")
        width = (hi - lo) * (settings.bracket_expansion - 1.0)
        grow_lo = abs(flo) < abs(fhi)
        if grow_lo and lo <= limits[0]:
            grow_lo = False
        if not grow_lo and hi >= limits[1]:
            if lo <= limits[0]:
                raise NoBracket(f"no sign change on [{lo}, {hi}] within limits")
            grow_lo = True
        if grow_lo:
            lo = max(lo - width, limits[0])
            flo = f(lo)
            if flo == 0.0:
                return lo
        else:
            hi = min(hi + width, limits[1])
            fhi = f(hi)
            if fhi == 0.0:
                return hi
        expansions += 1
    if not (math.isfinite(flo) and math.isfinite(fhi)):
        raise NoBracket("function is not finite at the bracket endpoints")

    side = 0
    x = 0.5 * (lo + hi)
    for it in range(settings.max_iter):
        use_secant = it % 3 != 2
        x = lo - flo * (hi - lo) / (fhi - flo) if use_secant else 0.5 * (lo + hi)
        if not (lo < x < hi):
            x = 0.5 * (lo + hi)
            if not (lo < x < hi):
                return lo if abs(flo) <= abs(fhi) else hi
        fx = f(x)
        if fx == 0.0:
            return x
        if _sign(fx) == _sign(flo):
            lo, flo = x, fx
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi, fhi = x, fx
            if side == 1:
                flo *= 0.5
            side = 1
        if hi - lo <= settings.abs_tol + 4.0 * EPS * abs(x):
            return x
    if hi - lo <= 1e3 * (settings.abs_tol + 4.0 * EPS * abs(x)):
        return x
    raise NoConvergence(f"no convergence after {settings.max_iter} iterations")


# antisymmetric first-derivative stencils as (offset, weight) for f(x + k h) - f(x - k h)
_STENCILS = {
    2: ((1, 0.5),),
    4: ((1, 2 / 3), (2, -1 / 12)),
}


def _call(f, point):
    try:
        return np.asarray(f(point), dtype=float)
    except StencilOutOfDomain:
        raise
    except DomainError as exc:
        raise StencilOutOfDomain(f"stencil point {point} rejected: {exc}") from exc


def _partials_once(f, point, h, order):
    point = np.asarray(point, dtype=float)
    out = []
    for i in range(point.size):
        acc = 0.0
        for k, w in _STENCILS[order]:
            p, m = point.copy(), point.copy()
            p[i] += k * h
            m[i] -= k * h
            acc = acc + w * (_call(f, p) - _call(f, m))
        out.append(acc / h)
    return np.array(out)


def fd_partials(f: Callable, point, settings: FDSettings = FDSettings()) -> np.ndarray:
    """Central-difference partials of an array-valued ``f``.

    Returns ``D`` with ``D[i] = df/dx_i`` (shape ``(dim,) + f.shape``).
    """
    point = np.asarray(point, dtype=float)
    h = settings.step(point)
    d = _partials_once(f, point, h, settings.order)
    if settings.richardson:
        d2 = _partials_once(f, point, h / 2, settings.order)
        k = 2 ** settings.order
        d = (k * d2 - d) / (k - 1)
    return d


def fd_gradient(f: Callable, point, settings: FDSettings = FDSettings()) -> np.ndarray:
    return fd_partials(f, point, settings)


def _hessian_once(f, point, h, order):
    n = point.size
    f0 = float(_call(f, point))
    H = np.zeros((n, n))
    if order == 2:
        second = ((-1, 1.0), (0, -2.0), (1, 1.0))
    else:
        second = ((-2, -1 / 12), (-1, 4 / 3), (0, -5 / 2), (1, 4 / 3), (2, -1 / 12))
    first = [(k, w) for k, w in _STENCILS[order]] + [(-k, -w) for k, w in _STENCILS[order]]
    for i in range(n):
        acc = 0.0
        for k, w in second:
            if k == 0:
                acc += w * f0
                continue
            p = point.copy()
            p[i] += k * h
            acc += w * float(_call(f, p))
        H[i, i] = acc / h**2
        for j in range(i):
            acc = 0.0
            for ki, wi in first:
                for kj, wj in first:
                    p = point.copy()
                    p[i] += ki * h
                    p[j] += kj * h
                    acc += wi * wj * float(_call(f, p))
            H[i, j] = H[j, i] = acc / h**2
    return H


def fd_hessian(f: Callable[[np.ndarray], float], point,
               settings: FDSettings = FDSettings()) -> np.ndarray:
    point = np.asarray(point, dtype=float)
    h = settings.step(point)
    H = _hessian_once(f, point, h, settings.order)
    if settings.richardson:
        k = 2 ** settings.order
        H = (k * _hessian_once(f, point, h / 2, settings.order) - H) / (k - 1)
    return H


def fd_laplacian(f: Callable[[np.ndarray], float], point,
                 settings: FDSettings = FDSettings()) -> float:
    return float(np.trace(fd_hessian(f, point, settings)))


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def antisymmetrize(t: np.ndarray) -> np.ndarray:
    """Alternating projection normalised so already-antisymmetric input is unchanged."""
    k = t.ndim
    out = np.zeros_like(t, dtype=float)
    for perm in itertools.permutations(range(k)):
        out = out + _perm_sign(perm) * np.transpose(t, perm)
    return out / math.factorial(k)


def fd_exterior_derivative(form: Callable, point,
                           settings: FDSettings = FDSettings(order=4)) -> np.ndarray:
    """Exterior derivative of a k-form field (k = 0, 1, 2) at ``point``.

    ``form(p)`` returns the antisymmetric component array at ``p`` (a scalar for
    k = 0). The result is the (k+1)-form ``(dw)[i0..ik] = sum_m (-1)^m d_{i_m} w[..^i_m..]``.
    """
    D = fd_partials(form, point, settings)
    k = D.ndim - 1
    if k == 0:
        return D
    if k > 2:
        raise ValueError("only 0-, 1- and 2-forms are supported")
    # D[i, j, ...] = d_i w[j, ...]; (k+1) * antisymmetrization gives dw
    return (k + 1) * antisymmetrize(D)


def hodge_star_r3(form: np.ndarray) -> np.ndarray:
    """Flat Euclidean Hodge star on R^3 for 1-forms (shape (3,)) and 2-forms (shape (3, 3)).

    dx -> dy^dz, dy -> dz^dx, dz -> dx^dy, and back.
    """
    form = np.asarray(form, dtype=float)
    if form.shape == (3,):
        a, b, c = form
        return np.array([[0.0, c, -b], [-c, 0.0, a], [b, -a, 0.0]])
    if form.shape == (3, 3):
        return np.array([form[1, 2], form[2, 0], form[0, 1]])
    raise ValueError("expected a 1-form (3,) or 2-form (3, 3) on R^3")


def two_form(pairs: dict[tuple[int, int], float], dim: int) -> np.ndarray:
    """Component array from coefficients of basis wedges, e.g. {(0, 1): 1.0} for dx^dy."""
    w = np.zeros((dim, dim))
    for (i, j), v in pairs.items():
        w[i, j] += v
        w[j, i] -= v
    return w


def wedge_1forms(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    return np.outer(a, b) - np.outer(b, a)


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def richardson(coarse, fine, order: int):
    k = 2**order
    return (k * np.asarray(fine) - np.asarray(coarse)) / (k - 1)
