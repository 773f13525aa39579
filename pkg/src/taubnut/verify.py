"""Numerical verification suites.

Each check samples points with its own seeded generator (derived from the
run seed and the check name), so reports are reproducible and independent
of the order or parallelism in which checks run.
"""
from __future__ import annotations

import math
import platform
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from . import __version__
from .core import GeometryConfig, Phase, RealChartPoint, TaubNutError
from .fields import classify_phase, eval_alpha, grad_potential, potential_xyz
from .hessian import G_inverse, G_matrix, hessian_check, symplectic_to_cylindrical
from .holomorphic import (chart_monomials, chart_transition, metric_ab_chart, metric_n1_at,
                          metric_z_chart_real, kahler_form_z_chart_real, series_z_r,
                          solve_all_roots, solve_z_from_ab, to_z_coords, z1_from_chart,
                          z_to_ab)
from .moment import (Membership, membership, moment_image_neg, moment_polytope,
                     moment_xyz)
from .numerics import (FDSettings, RootSolveSettings, fd_exterior_derivative, fd_laplacian,
                       hodge_star_r3)
from .realchart import (complex_structure, d_symplectic, metric_real, nijenhuis,
                        ricci_tensor_fd, symplectic_form)

DEFAULT_TOLERANCES = {
    "harmonicity": 1e-5,
    "monopole": 1e-6,
    "inverse_pair": 1e-10,
    "hessian": 1e-5,
    "ricci": 1e-4,
    "closedness": 1e-6,
    "compatibility": 1e-12,
    "nijenhuis": 1e-5,
    "roundtrip": 1e-10,
    "holomorphic_roundtrip": 1e-9,
    "containment": 1e-9,
    "phase_consistency": 1e-9,
    "two_routes": 1e-8,
    "kahler_form": 1e-8,
    "series": 10.0,
    "atlas": 0.0,
    "signature": 0.0,
}

SUITES = tuple(DEFAULT_TOLERANCES)

# sample caps for the expensive suites
SAMPLE_CAPS = {"ricci": 20, "hessian": 50, "nijenhuis": 100, "closedness": 100}


@dataclass
class CheckRecord:
    name: str
    samples: int
    max_residual: float
    tolerance: float
    passed: bool
    note: str = ""

    def __post_init__(self):
        self.samples = int(self.samples)
        self.max_residual = float(self.max_residual)
        self.tolerance = float(self.tolerance)
        self.passed = bool(self.passed)


@dataclass
class VerificationReport:
    records: list[CheckRecord]
    skipped: list[str]
    environment: dict
    manifest: dict = field(default_factory=dict)

    @property
    def overall_pass(self) -> bool:
        return all(r.passed for r in self.records)

    def to_dict(self) -> dict:
        return {
            "manifest": self.manifest,
            "environment": self.environment,
            "overall_pass": self.overall_pass,
            "records": [asdict(r) for r in self.records],
            "skipped": list(self.skipped),
        }


def environment_stamp() -> dict:
    return {"package": __version__, "python": platform.python_version(),
            "numpy": np.__version__}


def check_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


# --- sampling -------------------------------------------------------------------

def _dist_to_cut(config: GeometryConfig, x, y, z) -> float:
    rho = math.hypot(x, y)
    c1 = config.centers[0]
    return rho if z >= c1 else math.hypot(rho, z - c1)


def sample_points(config: GeometryConfig, rng: np.random.Generator, n: int, *,
                  box: float = 2.5, min_center: float = 0.3, min_cut: float = 0.3,
                  phase: Optional[Phase] = None, v_band: float = 0.05,
                  min_rho: float = 0.0, max_tries: int = 200000) -> np.ndarray:
    """Rejection-sample (x, y, z) points away from the singular set.

    ``phase`` restricts to V > v_band (PLUS) or V < -v_band (MINUS).
    """
    lo = np.array([-box, -box, config.centers[0] - box])
    hi = np.array([box, box, config.centers[-1] + box])
    out = []
    tries = 0
    while len(out) < n:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("rejection sampling failed to collect enough points")
        x, y, z = rng.uniform(lo, hi)
        if min(math.sqrt(x * x + y * y + (z - c) ** 2) for c in config.centers) < min_center:
            continue
        if min_cut > 0 and _dist_to_cut(config, x, y, z) < min_cut:
            continue
        if math.hypot(x, y) < min_rho:
            continue
        V = potential_xyz(config, x, y, z)
        if phase is Phase.PLUS and not V > v_band:
            continue
        if phase is Phase.MINUS and not V < -v_band:
            continue
        out.append((x, y, z))
    return np.array(out).reshape(-1, 3)


def _positive_phase(config):
    return Phase.PLUS if config.epsilon < 0 else None


def _with_phi(rng, pts):
    return [RealChartPoint(rng.uniform(0, 2 * math.pi), *p) for p in pts]


# --- checks -------------------------------------------------------------------------

def check_harmonicity(config, rng, samples, tol):
    fd = FDSettings(h=1e-3, order=4, scale_with_point=False)
    worst = 0.0
    pts = sample_points(config, rng, samples, min_cut=0.0, phase=None)
    for p in pts:
        lap = fd_laplacian(lambda q: potential_xyz(config, *q), p, fd)
        scale = max(1.0, float(np.linalg.norm(grad_potential(config, p))))
        worst = max(worst, abs(lap) / scale)
    return CheckRecord("harmonicity", len(pts), worst, tol, worst <= tol)


def check_monopole(config, rng, samples, tol,
                   alpha_fn: Callable = eval_alpha):
    """d(alpha) = -*dV, compared relative to |grad V|."""
    fd = FDSettings(h=1e-3, order=4, scale_with_point=False)
    worst = 0.0
    pts = sample_points(config, rng, samples)
    for p in pts:
        da = fd_exterior_derivative(lambda q: alpha_fn(config, q).as_array(), p, fd)
        gV = grad_potential(config, p)
        resid = da + hodge_star_r3(gV)
        worst = max(worst, float(np.max(np.abs(resid))) / float(np.linalg.norm(gV)))
    return CheckRecord("monopole", len(pts), worst, tol, worst <= tol)


def check_inverse_pair(config, rng, samples, tol):
    worst = 0.0
    pts = sample_points(config, rng, samples, phase=_positive_phase(config), min_rho=1e-3)
    for p in pts:
        P = G_matrix(config, p).matrix() @ G_inverse(config, p).matrix()
        worst = max(worst, float(np.max(np.abs(P - np.eye(2)))))
    return CheckRecord("inverse_pair", len(pts), worst, tol, worst <= tol)


def check_hessian(config, rng, samples, tol):
    worst = 0.0
    pts = sample_points(config, rng, samples, phase=_positive_phase(config), min_rho=0.2,
                        v_band=0.1)
    for p in pts:
        mu1, mu2 = moment_xyz(config, *p)
        resid = hessian_check(config, mu1, mu2)
        rho, z = symplectic_to_cylindrical(config, mu1, mu2)
        G = G_matrix(config, (rho, z)).matrix()
        worst = max(worst, float(np.max(np.abs(resid)) / np.max(np.abs(G))))
    return CheckRecord("hessian", len(pts), worst, tol, worst <= tol)


def check_ricci(config, rng, samples, tol):
    settings = FDSettings(h=1e-3, order=4, richardson=True)
    worst = 0.0
    pts = sample_points(config, rng, samples, phase=_positive_phase(config), box=2.0,
                        v_band=0.1)
    for q in _with_phi(rng, pts):
        worst = max(worst, float(np.max(np.abs(ricci_tensor_fd(config, q, settings)))))
    return CheckRecord("ricci", len(pts), worst, tol, worst <= tol)


def check_closedness(config, rng, samples, tol):
    worst = 0.0
    pts = sample_points(config, rng, samples)
    for q in _with_phi(rng, pts):
        worst = max(worst, float(np.max(np.abs(d_symplectic(config, q)))))
    return CheckRecord("closedness", len(pts), worst, tol, worst <= tol)


def check_compatibility(config, rng, samples, tol, pairs: int = 20):
    """g(JX, JY) = g(X, Y) and omega(X, Y) = g(JX, Y), relative to |g| |X| |Y|."""
    worst = 0.0
    pts = sample_points(config, rng, samples, phase=_positive_phase(config))
    for q in _with_phi(rng, pts):
        g = metric_real(config, q)
        J = complex_structure(config, q)
        w = symplectic_form(config, q)
        scale = float(np.max(np.abs(g)))
        for _ in range(pairs):
            X, Y = rng.normal(size=4), rng.normal(size=4)
            norm = scale * np.linalg.norm(X) * np.linalg.norm(Y)
            e1 = abs((J @ X) @ g @ (J @ Y) - X @ g @ Y) / norm
            e2 = abs(X @ w @ Y - (J @ X) @ g @ Y) / norm
            worst = max(worst, e1, e2)
    return CheckRecord("compatibility", len(pts), worst, tol, worst <= tol)


def check_nijenhuis(config, rng, samples, tol):
    worst = 0.0
    pts = sample_points(config, rng, samples, phase=_positive_phase(config), v_band=0.1)
    for q in _with_phi(rng, pts):
        worst = max(worst, float(np.max(np.abs(nijenhuis(config, q)))))
    return CheckRecord("nijenhuis", len(pts), worst, tol, worst <= tol)


def check_roundtrip(config, rng, samples, tol):
    """symplectic_to_cylindrical inverts the moment map on the positive phase."""
    worst = 0.0
    pts = sample_points(config, rng, samples, phase=_positive_phase(config), min_cut=0.05)
    for x, y, z in pts:
        mu1, mu2 = moment_xyz(config, x, y, z)
        rho, zz = symplectic_to_cylindrical(config, mu1, mu2)
        worst = max(worst, abs(rho - math.hypot(x, y)), abs(zz - z))
    return CheckRecord("roundtrip", len(pts), worst, tol, worst <= tol)


def check_holomorphic_roundtrip(config, rng, samples, tol):
    """Real point -> (z1, z2) -> (alpha, beta) -> solved (z, r), one center at the origin."""
    worst = 0.0
    pts = sample_points(config, rng, samples, v_band=0.05,
                        phase=_positive_phase(config) if config.epsilon >= 0 else None)
    for q in _with_phi(rng, pts):
        V = potential_xyz(config, q.x, q.y, q.z)
        a, b = z_to_ab(*to_z_coords(config, q))
        phase = Phase.PLUS if V > 0 else Phase.MINUS
        roots = [s for s in solve_all_roots(config, a, b) if s.phase is phase]
        best = min(roots, key=lambda s: abs(s.z - q.z))
        r = math.sqrt(q.x**2 + q.y**2 + q.z**2)
        worst = max(worst, abs(best.z - q.z), abs(best.r - r))
    return CheckRecord("holomorphic_roundtrip", len(pts), worst, tol, worst <= tol)


def check_containment(config, rng, samples, tol):
    """All l_k >= -tol on the image, and axis approaches make min l_k small."""
    planes = moment_polytope(config)
    worst = 0.0
    pts = sample_points(config, rng, samples, min_cut=0.0, min_center=1e-3)
    for x, y, z in pts:
        mu = moment_xyz(config, x, y, z)
        worst = max(worst, -min(l(*mu) for l in planes))
    # axis approach: rho -> 0 puts the image on the facet active at height z
    sharp = []
    cs = config.centers
    heights = [cs[0] - 1.0] + [0.5 * (a + b) for a, b in zip(cs, cs[1:])] + [cs[-1] + 1.0]
    for k, z in enumerate(heights):
        mu = moment_xyz(config, 1e-4, 0.0, z)
        sharp.append(planes[k](*mu))
    ok = worst <= tol and max(sharp) < 0.05
    return CheckRecord("containment", len(pts), worst, tol, ok,
                       note=f"max over facets of min l_k near axis = {max(sharp):.3e}")


def check_phase_consistency(config, rng, samples, tol):
    """epsilon < 0: PLUS points map inside the positive image, MINUS points below its bound."""
    image = moment_image_neg(config)
    worst = 0.0
    mismatches = 0
    pts = sample_points(config, rng, samples, min_cut=0.0, v_band=1e-6)
    for x, y, z in pts:
        label = classify_phase(config, (x, y, z), delta=1e-6).phase
        mu1, mu2 = moment_xyz(config, x, y, z)
        if label is Phase.PLUS:
            m = membership(config, mu1, mu2, tol=tol, image=image)
            if m is Membership.OUTSIDE:
                mismatches += 1
                worst = max(worst, image.lower_bound(mu1) - mu2, mu2 - image.upper_bound(mu1))
        elif label is Phase.MINUS:
            excess = mu2 - image.minus_bound(mu1)
            if excess >= tol:
                mismatches += 1
            worst = max(worst, excess if excess > 0 else 0.0)
    return CheckRecord("phase_consistency", len(pts), worst, tol, mismatches == 0,
                       note=f"{mismatches} mismatches")


def check_two_routes(config, rng, samples, tol):
    """Complex-chart metrics against the real-chart metric (and the n = 1 closed form)."""
    worst = 0.0
    pts = sample_points(config, rng, samples, v_band=0.05, min_rho=0.05,
                        phase=Phase.PLUS if config.epsilon >= 0 else None)
    single = config.n == 1 and config.centers[0] == 0.0
    for q in _with_phi(rng, pts):
        g = metric_real(config, q)
        worst = max(worst, float(np.max(np.abs(metric_z_chart_real(config, q) - g)))
                    / float(np.max(np.abs(g))))
        if single:
            a, b = z_to_ab(*to_z_coords(config, q))
            hab = metric_ab_chart(config, q).to_plain(a, b)
            r = math.sqrt(q.x**2 + q.y**2 + q.z**2)
            hn = metric_n1_at(config.epsilon, a, b, q.z, r)
            worst = max(worst, float(np.max(np.abs(hab.matrix() - hn.matrix())))
                        / float(np.max(np.abs(hab.matrix()))))
    return CheckRecord("two_routes", len(pts), worst, tol, worst <= tol)


def check_kahler_form(config, rng, samples, tol):
    worst = 0.0
    pts = sample_points(config, rng, samples, v_band=0.05, min_rho=0.05)
    for q in _with_phi(rng, pts):
        w = symplectic_form(config, q)
        worst = max(worst, float(np.max(np.abs(kahler_form_z_chart_real(config, q) - w)))
                    / float(np.max(np.abs(w))))
    return CheckRecord("kahler_form", len(pts), worst, tol, worst <= tol)


def check_series(config, rng, samples, tol):
    """Ratio |z_solver - z_series| / (|eps|^3 (|a|^2 + |b|^2)^3) must stay below ``tol``."""
    worst = 0.0
    settings = RootSolveSettings(abs_tol=1e-18)
    n = 0
    while n < samples:
        a = complex(*rng.uniform(-1, 1, 2))
        b = complex(*rng.uniform(-1, 1, 2))
        if abs(a) > 1 or abs(b) > 1 or abs(b) < 1e-3:
            continue
        eps = float(rng.uniform(-1e-2, 1e-2))
        if eps == 0.0:
            continue
        cfg = GeometryConfig(eps, (0.0,))
        z, _ = solve_z_from_ab(cfg, a, b, Phase.PLUS, settings=settings)
        zs, _ = series_z_r(a, b, eps, 2)
        A, B = abs(a) ** 2, abs(b) ** 2
        worst = max(worst, abs(z - zs) / (abs(eps) ** 3 * (A + B) ** 3))
        n += 1
    return CheckRecord("series", n, worst, tol, worst <= tol)


def check_atlas(config, rng, samples, tol, max_chart: int = 4):
    from fractions import Fraction

    bad = 0
    for i in range(1, max_chart + 1):
        (a1, a2), (b1, b2) = chart_monomials(i)
        if (a1 + b1, a2 + b2) != (1, 1):
            bad += 1
        if ((i - 1) * a1 + i * b1, (i - 1) * a2 + i * b2) != (0, 1):
            bad += 1
    for _ in range(samples):
        alpha = Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 50))) * int(rng.choice([-1, 1]))
        beta = Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 50))) * int(rng.choice([-1, 1]))
        a, b = alpha, beta
        for i in range(1, max_chart + 1):
            (p1, p2), (q1, q2) = chart_monomials(i)
            if (a, b) != (alpha**p1 * beta**p2, alpha**q1 * beta**q2):
                bad += 1
            if a * b != alpha * beta or z1_from_chart(i, a, b) != beta:
                bad += 1
            a, b = chart_transition(i, a, b)
    return CheckRecord("atlas", samples, float(bad), tol, bad == 0)


def check_signature(config, rng, samples, tol):
    """Sign of the n = 1 closed-form metric on solved points of each phase."""
    bad = 0
    pts_p = sample_points(config, rng, samples, min_cut=0.05, phase=Phase.PLUS, v_band=1e-3,
                          min_rho=1e-3)
    pts_m = sample_points(config, rng, samples, min_cut=0.05, phase=Phase.MINUS, v_band=1e-3,
                          min_rho=1e-3)
    for pts, phase in ((pts_p, Phase.PLUS), (pts_m, Phase.MINUS)):
        for q in _with_phi(rng, pts):
            a, b = z_to_ab(*to_z_coords(config, q))
            roots = [s for s in solve_all_roots(config, a, b) if s.phase is phase]
            for s in roots:
                h = metric_n1_at(config.epsilon, a, b, s.z, s.r)
                ok = h.is_positive_definite() if phase is Phase.PLUS else h.is_negative_definite()
                bad += not ok
    return CheckRecord("signature", 2 * samples, float(bad), tol, bad == 0)


CHECKS = {
    "harmonicity": check_harmonicity,
    "monopole": check_monopole,
    "inverse_pair": check_inverse_pair,
    "hessian": check_hessian,
    "ricci": check_ricci,
    "closedness": check_closedness,
    "compatibility": check_compatibility,
    "nijenhuis": check_nijenhuis,
    "roundtrip": check_roundtrip,
    "holomorphic_roundtrip": check_holomorphic_roundtrip,
    "containment": check_containment,
    "phase_consistency": check_phase_consistency,
    "two_routes": check_two_routes,
    "kahler_form": check_kahler_form,
    "series": check_series,
    "atlas": check_atlas,
    "signature": check_signature,
}


def applicable(name: str, config: GeometryConfig) -> bool:
    single = config.n == 1 and config.centers[0] == 0.0
    if name == "containment":
        return config.epsilon >= 0
    if name in ("phase_consistency",):
        return config.epsilon < 0
    if name == "signature":
        return config.epsilon < 0 and single
    if name == "holomorphic_roundtrip":
        return single
    return True


def run_check(name: str, config: GeometryConfig, samples: int, seed: int, tol: float,
              hooks: Optional[dict] = None) -> CheckRecord:
    rng = check_rng(seed, name)
    n = min(samples, SAMPLE_CAPS.get(name, samples))
    fn = CHECKS[name]
    kwargs = {}
    if hooks and name == "monopole" and "alpha" in hooks:
        kwargs["alpha_fn"] = hooks["alpha"]
    try:
        return fn(config, rng, n, tol, **kwargs)
    except (TaubNutError, RuntimeError, ArithmeticError) as exc:
        return CheckRecord(name, n, math.inf, tol, False, note=f"error: {exc}")


def _run_check_args(args):
    return run_check(*args)


def run_verification(config: GeometryConfig, suites=None, samples: int = 200, seed: int = 0,
                     tolerances: Optional[dict] = None, jobs: int = 1,
                     hooks: Optional[dict] = None, manifest: Optional[dict] = None
                     ) -> VerificationReport:
    tols = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tols)
        if unknown:
            raise ValueError(f"unknown tolerance names: {sorted(unknown)}")
        tols.update(tolerances)
    names = list(SUITES) if suites in (None, "all") else list(suites)
    for s in names:
        if s not in CHECKS:
            raise ValueError(f"unknown suite {s!r}")
    run = [s for s in names if applicable(s, config)]
    skipped = [s for s in names if s not in run]
    args = [(s, config, samples, seed, tols[s], hooks) for s in run]
    if jobs > 1 and hooks is None and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_check_args, args))
    else:
        records = [_run_check_args(a) for a in args]
    m = dict(manifest or {})
    m.setdefault("tolerances", {s: tols[s] for s in run})
    return VerificationReport(records, skipped, environment_stamp(), m)


def hessian_report(config: GeometryConfig, samples: int, seed: int, tol: float = 1e-5) -> dict:
    rec = run_check("hessian", config, samples, seed, tol)
    return asdict(rec)


def flip_alpha(config, point):
    """Negative-control hook: the connection with its sign reversed."""
    a = eval_alpha(config, point)
    return type(a)(-a.a_x, -a.a_y)

