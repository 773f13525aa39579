"""Moment map of the 2-torus action and descriptions of its image."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import GeometryConfig, NegativeEpsilon, SymplecticPoint, check_domain
from .fields import NoPositiveRoot, plus_gap, potential_on_slice, r_values, solve_pa
from .numerics import RootSolveSettings, solve_monotone_root


@dataclass(frozen=True)
class HalfPlane:
    """l(mu1, mu2) = A mu1 + B mu2 + C, with l >= 0 on the inside."""

    A: float
    B: float
    C: float

    def __post_init__(self):
        if self.A == 0 and self.B == 0:
            raise ValueError("degenerate half-plane")

    def __call__(self, mu1: float, mu2: float) -> float:
        return self.A * mu1 + self.B * mu2 + self.C


class Membership(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"


def mu2_on_slice(config: GeometryConfig, p: float, z: float) -> float:
    """mu2 as a function of p = rho^2 at height z (the function f_z of the text)."""
    total = 0.0
    for c in config.centers:
        d = z - c
        r = math.sqrt(p + d * d)
        total += plus_gap(r, d, p)
    return 0.25 * config.epsilon * p + 0.5 * total


def moment_map(config: GeometryConfig, point) -> SymplecticPoint:
    x, y, z = point.x, point.y, point.z
    check_domain(config, x, y, z, cut=False)
    mu2 = mu2_on_slice(config, x * x + y * y, z)
    return SymplecticPoint(-z, mu2, point.phi, math.atan2(y, x))


def moment_xyz(config: GeometryConfig, x: float, y: float, z: float) -> tuple[float, float]:
    return -z, mu2_on_slice(config, x * x + y * y, z)


def grad_mu2(config: GeometryConfig, x: float, y: float, z: float) -> np.ndarray:
    """Closed-form differential of mu2 in (x, y, z)."""
    eps = config.epsilon
    g = np.array([0.5 * eps * x, 0.5 * eps * y, 0.0])
    for r, c in zip(r_values(config, x, y, z), config.centers):
        g += 0.5 * np.array([x / r, y / r, (z - c) / r + 1.0])
    return g


def moment_polytope(config: GeometryConfig) -> list[HalfPlane]:
    """l_k = mu2 + sum_{j<=k} (mu1 + c_j) >= 0 for k = 0..n."""
    if config.epsilon < 0:
        raise NegativeEpsilon("the half-plane description holds for epsilon >= 0")
    planes = [HalfPlane(0.0, 1.0, 0.0)]
    for k in range(1, config.n + 1):
        planes.append(HalfPlane(float(k), 1.0, float(sum(config.centers[:k]))))
    return planes


def lower_envelope(config: GeometryConfig, mu1: float) -> float:
    """1/2 sum_j (|mu1 + c_j| - mu1 - c_j): the value of mu2 on the axis rho = 0."""
    return sum(max(0.0, -(mu1 + c)) for c in config.centers)


@dataclass(frozen=True)
class MomentImageNeg:
    """Image of the positive phase for epsilon = -a < 0: lower <= mu2 < upper.

    ``minus_bound`` bounds the image of the negative phase from above
    (mu2 < minus_bound) and is defined for every mu1.
    """

    a: float
    lower_bound: Callable[[float], float]
    upper_bound: Callable[[float], float]
    minus_bound: Callable[[float], float]
    config: GeometryConfig | None = field(default=None, compare=False)

    def plus_slice_nonempty(self, mu1: float) -> bool:
        try:
            self.upper_bound(mu1)
        except NoPositiveRoot:
            return False
        return True


def moment_image_neg_n1(a: float) -> MomentImageNeg:
    if not a > 0:
        raise ValueError("a must be positive")

    def lower(mu1):
        return 0.5 * (abs(mu1) - mu1)

    def upper(mu1):
        if not abs(mu1) < 1.0 / a:
            raise NoPositiveRoot(f"positive phase slice empty at mu1={mu1}")
        return (1.0 - a * mu1) ** 2 / (4.0 * a)

    def minus(mu1):
        if abs(mu1) < 1.0 / a:
            return (1.0 - a * mu1) ** 2 / (4.0 * a)
        return lower(mu1)

    return MomentImageNeg(a, lower, upper, minus, GeometryConfig(-a, (0.0,)))


def moment_image_neg(config: GeometryConfig,
                     settings: RootSolveSettings = RootSolveSettings(abs_tol=1e-15)
                     ) -> MomentImageNeg:
    if not config.epsilon < 0:
        raise ValueError("moment_image_neg needs epsilon < 0")

    def lower(mu1):
        return lower_envelope(config, mu1)

    def upper(mu1):
        z = -mu1
        return mu2_on_slice(config, solve_pa(config, z, settings), z)

    def minus(mu1):
        try:
            return upper(mu1)
        except NoPositiveRoot:
            # f_z decreases on the whole ray, its sup is the axis value
            return lower(mu1)

    return MomentImageNeg(config.a, lower, upper, minus, config)


def membership(config: GeometryConfig, mu1: float, mu2: float, tol: float = 1e-12,
               image: MomentImageNeg | None = None) -> Membership:
    """Locate (mu1, mu2) relative to the moment image (of the positive phase if epsilon < 0)."""
    if config.epsilon >= 0:
        values = [l(mu1, mu2) for l in moment_polytope(config)]
        m = min(values)
        if m > tol:
            return Membership.INSIDE
        if m < -tol:
            return Membership.OUTSIDE
        return Membership.BOUNDARY
    if image is None:
        image = moment_image_neg(config)
    lo = image.lower_bound(mu1)
    try:
        hi = image.upper_bound(mu1)
    except NoPositiveRoot:
        return Membership.OUTSIDE
    margin = min(mu2 - lo, hi - mu2)
    if margin > tol:
        return Membership.INSIDE
    if margin < -tol:
        return Membership.OUTSIDE
    return Membership.BOUNDARY


def plus_intervals(config: GeometryConfig, lo: float, hi: float, probe: int = 2001,
                   settings: RootSolveSettings = RootSolveSettings(abs_tol=1e-14)
                   ) -> list[tuple[float, float]]:
    """Sub-intervals of [lo, hi] in mu1 where the positive-phase slice is nonempty.

    Membership of a slice is decided by V(rho=0; z=-mu1) > 0; edges are
    refined by bisection to the zero of that axis potential.
    """
    if not config.epsilon < 0:
        return [(lo, hi)]

    def axis_v(mu1):
        z = -mu1
        if min(abs(z - c) for c in config.centers) == 0.0:
            return math.inf
        return potential_on_slice(config, 0.0, z)

    # mu1 = -c_j sits inside the positive phase, so add those as probe points
    grid = sorted(set(np.linspace(lo, hi, probe).tolist()
                      + [-c for c in config.centers if lo < -c < hi]))
    inside = [axis_v(m) > 0 for m in grid]

    def edge(a, b):
        def g(m):
            v = axis_v(m)
            return 1.0 if v == math.inf else v
        return solve_monotone_root(g, a, b, settings)

    out = []
    start = grid[0] if inside[0] else None
    for i in range(1, len(grid)):
        if inside[i] and not inside[i - 1]:
            start = edge(grid[i - 1], grid[i])
        elif not inside[i] and inside[i - 1]:
            out.append((start, edge(grid[i - 1], grid[i])))
            start = None
    if start is not None:
        out.append((start, grid[-1]))
    return out


def _facet_spans(config: GeometryConfig, lo: float, hi: float):
    """(k, mu1_min, mu1_max) where facet l_k = 0 is the lower boundary inside [lo, hi]."""
    breaks = [math.inf] + [-c for c in config.centers] + [-math.inf]
    spans = []
    for k in range(config.n + 1):
        a, b = max(breaks[k + 1], lo), min(breaks[k], hi)
        if a < b:
            spans.append((k, a, b))
    return spans


def sample_boundary(config: GeometryConfig, mu1_range: tuple[float, float], steps: int,
                    image: MomentImageNeg | None = None) -> list[tuple[str, np.ndarray]]:
    """Ordered (mu1, mu2) samples of each boundary piece, ready for plotting.

    Pieces are named ``l<k>`` for the facets l_k = 0, ``upper<i>`` for the
    curved upper boundary of the positive-phase image and ``minus_upper`` for
    the bound of the negative-phase image.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    lo, hi = mu1_range
    if not lo < hi:
        raise ValueError("empty mu1 range")
    pieces = []
    if config.epsilon >= 0:
        for k, a, b in _facet_spans(config, lo, hi):
            m = np.linspace(a, b, steps)
            pieces.append((f"l{k}", np.column_stack([m, [lower_envelope(config, t) for t in m]])))
        return pieces

    if image is None:
        image = moment_image_neg(config)
    intervals = plus_intervals(config, lo, hi)
    for ia, ib in intervals:
        for k, a, b in _facet_spans(config, ia, ib):
            m = np.linspace(a, b, steps)
            pieces.append((f"l{k}", np.column_stack([m, [lower_envelope(config, t) for t in m]])))
    for i, (a, b) in enumerate(intervals):
        m = np.linspace(a, b, steps)
        pieces.append((f"upper{i}", np.column_stack([m, [image.minus_bound(t) for t in m]])))
    m = np.linspace(lo, hi, steps)
    pieces.append(("minus_upper", np.column_stack([m, [image.minus_bound(t) for t in m]])))
    return pieces


def _convex_supporting_line_test(mu1: np.ndarray, h: np.ndarray, tol: float) -> int:
    """Count samples lying below a supporting line of the sampled graph."""
    violations = 0
    for i in range(1, len(mu1) - 1):
        left = (h[i] - h[i - 1]) / (mu1[i] - mu1[i - 1])
        right = (h[i + 1] - h[i]) / (mu1[i + 1] - mu1[i])
        for s in (left, right):
            below = h + tol < h[i] + s * (mu1 - mu1[i])
            violations += int(np.sum(below))
    return violations


def convexity_experiment(config: GeometryConfig, mu1_range: tuple[float, float],
                         grid: int, tol: float = 1e-9) -> dict:
    """Second-difference statistics of the curved upper boundary (epsilon < 0).

    Exploratory only: no truth value is asserted for n >= 2.
    """
    if not config.epsilon < 0:
        raise ValueError("convexity experiment needs epsilon < 0")
    report: dict = {
        "epsilon": config.epsilon,
        "centers": list(config.centers),
        "grid": int(grid),
        "mu1_range": [float(mu1_range[0]), float(mu1_range[1])],
        "intervals": [],
    }
    if grid < 3:
        report["second_difference"] = {"count": 0, "positive": 0, "negative": 0, "zero": 0,
                                       "min": None, "max": None}
        report["tangency"] = []
        return report
    image = moment_image_neg(config)
    intervals = plus_intervals(config, *mu1_range)
    report["intervals"] = [[a, b] for a, b in intervals]
    diffs = []
    tangency = []
    for a, b in intervals:
        m = np.linspace(a, b, grid)
        u = np.array([image.minus_bound(t) for t in m])
        step = m[1] - m[0]
        d2 = (u[:-2] - 2 * u[1:-1] + u[2:]) / step**2
        diffs.extend(d2.tolist())
        for end, inner in ((0, 1), (-1, -2)):
            slope = (u[inner] - u[end]) / (m[inner] - m[end])
            lo_slope = (lower_envelope(config, m[inner]) - lower_envelope(config, m[end])) \
                / (m[inner] - m[end])
            tangency.append({
                "mu1": float(m[end]),
                "gap": float(u[end] - lower_envelope(config, m[end])),
                "slope_mismatch": float(slope - lo_slope),
            })
    d = np.array(diffs)
    report["second_difference"] = {
        "count": int(d.size),
        "positive": int(np.sum(d > tol)),
        "negative": int(np.sum(d < -tol)),
        "zero": int(np.sum(np.abs(d) <= tol)),
        "min": float(d.min()) if d.size else None,
        "max": float(d.max()) if d.size else None,
    }
    report["tangency"] = tangency
    if config.n == 1 and config.centers[0] == 0.0:
        # union of the positive image with the complement of the negative image
        # is the epigraph of h = lower on the positive slice range, parabola elsewhere
        # (exact negative image: mu2 <= lower off the positive range; the looser
        # parabola bound gives a second variant)
        a = config.a
        lo, hi = mu1_range
        m = np.linspace(lo, hi, grid)
        h_exact = np.array([image.lower_bound(t) for t in m])
        h_parab = np.array([image.lower_bound(t) if abs(t) < 1.0 / a
                            else (1.0 - a * t) ** 2 / (4.0 * a) for t in m])
        report["union_convexity"] = {
            "samples": int(grid),
            "supporting_line_violations": _convex_supporting_line_test(m, h_exact, tol),
            "supporting_line_violations_parabola_bound":
                _convex_supporting_line_test(m, h_parab, tol),
        }
    return report
