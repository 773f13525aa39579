"""Acceptance criteria 1-13, each at its stated tolerance, sample count and time budget.

Every test appends a PASS/FAIL line to ``conftest.ACCEPTANCE_RESULTS``; the lines are
printed in the terminal summary.
"""
import json
import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from conftest import ACCEPTANCE_RESULTS
from taubnut.cli import main
from taubnut.core import GeometryConfig, Phase, RealChartPoint
from taubnut.fields import classify_phase
from taubnut.hessian import G_inverse, G_matrix, symplectic_to_cylindrical
from taubnut.holomorphic import (chart_transition, metric_ab_chart, metric_n1, metric_n1_at,
                                 metric_z_chart_real, solve_z_from_ab, to_z_coords, z_to_ab)
from taubnut.moment import moment_image_neg, moment_polytope, moment_xyz
from taubnut.realchart import metric_real
from taubnut.verify import (check_closedness, check_compatibility, check_harmonicity,
                            check_hessian, check_monopole, check_nijenhuis, check_ricci,
                            check_series, check_signature, sample_points)

GOLDEN = Path(__file__).parent / "golden"


def record(name, passed, detail, elapsed, budget):
    ok = bool(passed) and elapsed < budget
    ACCEPTANCE_RESULTS.append((name, ok, f"{detail}; {elapsed:.2f}s (budget {budget:g}s)"))
    assert passed, detail
    assert elapsed < budget, f"{name} took {elapsed:.2f}s > {budget}s"


def rng_for(k):
    return np.random.default_rng([2024, k])


def _phi(rng, pts):
    return [RealChartPoint(float(rng.uniform(0, 2 * math.pi)), *p) for p in pts]


def test_ac01_flat_limit():
    rng = rng_for(1)
    cfg = GeometryConfig(0.0, (0.0,))
    t = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        a, b = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        for h in (metric_n1(0.0, a, b), metric_n1_at(0.0, a, b, *solve_z_from_ab(cfg, a, b))):
            worst = max(worst, abs(h.h11 - 1), abs(h.h12), abs(h.h22 - 1))
        # independent route through the real chart: (alpha, beta) = (z2 / z1, z1)
        z, r = solve_z_from_ab(cfg, a, b)
        rho = math.sqrt(max(r * r - z * z, 0.0))
        q = RealChartPoint(math.atan2(b.imag, b.real), rho * math.cos(np.angle(a * b)),
                           rho * math.sin(np.angle(a * b)), z)
        h = metric_ab_chart(cfg, q).to_plain(a, b)
        worst = max(worst, abs(h.h11 - 1), abs(h.h12), abs(h.h22 - 1))
    el = time.perf_counter() - t
    record("AC1 flat limit", worst < 1e-12, f"max|h - (1,0,1)| = {worst:.2e} < 1e-12", el, 1.0)


def test_ac02_inverse_pair():
    configs = [GeometryConfig(0.0, (0.0,)), GeometryConfig(1.0, (0.0,)),
               GeometryConfig(0.0, (0.0, 1.0)), GeometryConfig(0.5, (0.0, 1.0))]
    pts = [sample_points(c, rng_for(2), 1000, min_rho=1e-3) for c in configs]
    t = time.perf_counter()
    worst = 0.0
    for c, P in zip(configs, pts):
        for p in P:
            rho, z = math.hypot(p[0], p[1]), p[2]
            M = G_matrix(c, (rho, z)).matrix() @ G_inverse(c, (rho, z)).matrix()
            worst = max(worst, float(np.max(np.abs(M - np.eye(2)))))
    el = time.perf_counter() - t
    record("AC2 inverse pair", worst < 1e-10,
           f"max|G Ginv - I| = {worst:.2e} < 1e-10 over 4x1000 points", el, 1.0)


FIELD_CONFIGS = [GeometryConfig(0.0, (0.0,)), GeometryConfig(1.0, (0.0,)),
                 GeometryConfig(0.5, (0.0, 1.0)), GeometryConfig(-1.0, (0.0,))]


def test_ac03_harmonicity_and_monopole():
    t = time.perf_counter()
    lap = mono = 0.0
    for k, c in enumerate(FIELD_CONFIGS):
        lap = max(lap, check_harmonicity(c, rng_for(30 + k), 200, 1e-5).max_residual)
        mono = max(mono, check_monopole(c, rng_for(40 + k), 200, 1e-6).max_residual)
    el = time.perf_counter() - t
    record("AC3 harmonicity/monopole", lap <= 1e-5 and mono <= 1e-6,
           f"|lap V| rel = {lap:.2e} <= 1e-5, |d alpha + *dV| rel = {mono:.2e} <= 1e-6",
           el, 5.0)


def test_ac04_kahler_package():
    t = time.perf_counter()
    comp = clos = nij = 0.0
    for k, c in enumerate(FIELD_CONFIGS):
        comp = max(comp, check_compatibility(c, rng_for(50 + k), 100, 1e-12).max_residual)
        clos = max(clos, check_closedness(c, rng_for(60 + k), 100, 1e-6).max_residual)
        nij = max(nij, check_nijenhuis(c, rng_for(70 + k), 100, 1e-5).max_residual)
    el = time.perf_counter() - t
    record("AC4 Kahler package", comp <= 1e-12 and clos < 1e-6 and nij < 1e-5,
           f"compat {comp:.2e} <= 1e-12, d omega {clos:.2e} < 1e-6, N_J {nij:.2e} < 1e-5",
           el, 10.0)


def test_ac05_ricci_flat():
    configs = [GeometryConfig(0.0, (0.0,)), GeometryConfig(1.0, (0.0,)),
               GeometryConfig(0.5, (0.0, 1.0))]
    t = time.perf_counter()
    worst = max(check_ricci(c, rng_for(80 + k), 20, 1e-4).max_residual
                for k, c in enumerate(configs))
    el = time.perf_counter() - t
    record("AC5 Ricci flat", worst < 1e-4, f"max|Ric| = {worst:.2e} < 1e-4 (3x20 points)",
           el, 60.0)


def test_ac06_hessian_identity():
    configs = [GeometryConfig(0.0, (0.0,)), GeometryConfig(1.0, (0.0,)),
               GeometryConfig(0.5, (0.0, 1.0)), GeometryConfig(-1.0, (0.0,))]
    t = time.perf_counter()
    worst = max(check_hessian(c, rng_for(90 + k), 50, 1e-5).max_residual
                for k, c in enumerate(configs))
    el = time.perf_counter() - t
    record("AC6 Hessian identity", worst < 1e-5, f"rel |Hess psi - G| = {worst:.2e} < 1e-5",
           el, 10.0)


def test_ac07_containment():
    t = time.perf_counter()
    worst, sharp = -math.inf, -math.inf
    for k, c in enumerate([GeometryConfig(0.0, (0.0,)), GeometryConfig(1.0, (-0.5, 0.2, 1.0))]):
        planes = moment_polytope(c)
        P = rng_for(100 + k).uniform(-3, 3, size=(10_000, 3))
        for x, y, z in P:
            mu = moment_xyz(c, x, y, z)
            worst = max(worst, -min(l(*mu) for l in planes))
        # approach the axis below, between and above the centers
        cs = c.centers
        heights = [cs[0] - 1.0] + [0.5 * (a + b) for a, b in zip(cs, cs[1:])] + [cs[-1] + 1.0]
        for h in heights:
            mu = moment_xyz(c, 1e-4, 0.0, h)
            sharp = max(sharp, min(l(*mu) for l in planes))
    el = time.perf_counter() - t
    record("AC7 containment", worst <= 1e-9 and sharp < 0.05,
           f"min sampled l_k = {-worst:.2e} (>= -1e-9), axis-approach min l_k <= {sharp:.2e} < 0.05",
           el, 5.0)


def test_ac08_negative_phase_band():
    cfg = GeometryConfig(-1.0, (0.0,))
    lower = lambda m: 0.5 * (abs(m) - m)
    upper = lambda m: (1 - m) ** 2 / 4
    rng = rng_for(110)
    t = time.perf_counter()
    bad = 0
    n_plus = 0
    P = rng.uniform(-1.5, 1.5, size=(10_000, 3))
    for x, y, z in P:
        ph = classify_phase(cfg, (x, y, z), delta=1e-9).phase
        m1, m2 = moment_xyz(cfg, x, y, z)
        if ph is Phase.PLUS:
            n_plus += 1
            bad += not (lower(m1) - 1e-12 <= m2 < upper(m1) + 1e-12)
        elif ph is Phase.MINUS:
            # the negative phase lies under the same parabola, or under the axis value
            bound = upper(m1) if abs(m1) < 1 else lower(m1)
            bad += m2 > bound + 1e-12
    # converse: band points pull back to the positive phase
    for _ in range(2000):
        m1 = rng.uniform(-0.99, 0.99)
        m2 = rng.uniform(lower(m1), upper(m1))
        if m2 <= lower(m1) + 1e-9 or m2 >= upper(m1) - 1e-9:
            continue
        rho, z = symplectic_to_cylindrical(cfg, m1, m2)
        bad += classify_phase(cfg, (rho, 0.0, z), delta=1e-12).phase is not Phase.PLUS
    img = moment_image_neg(cfg)
    dev = max(max(abs(img.upper_bound(m) - upper(m)), abs(img.lower_bound(m) - lower(m)))
              for m in np.linspace(-0.9, 0.9, 181))
    el = time.perf_counter() - t
    record("AC8 phase/image consistency", bad == 0 and dev < 1e-10,
           f"{bad} disagreements ({n_plus} plus points), bound deviation {dev:.2e} < 1e-10",
           el, 5.0)


def test_ac09_series_vs_solver():
    t = time.perf_counter()
    rec = check_series(None, rng_for(120), 500, 10.0)
    el = time.perf_counter() - t
    record("AC9 series agreement", rec.passed,
           f"max |z_solve - z_series| / (|eps|^3 (|a|^2+|b|^2)^3) = {rec.max_residual:.3f} <= 10",
           el, 2.0)


def test_ac10_chart_atlas():
    rng = rng_for(130)
    t = time.perf_counter()
    bad = 0
    for _ in range(200):
        a = Fraction(int(rng.integers(1, 99)), int(rng.integers(1, 99))) * int(rng.choice([-1, 1]))
        b = Fraction(int(rng.integers(1, 99)), int(rng.integers(1, 99))) * int(rng.choice([-1, 1]))
        z1 = b
        for i in range(1, 5):
            bad += a ** (i - 1) * b ** i != z1
            a2, b2 = chart_transition(i, a, b)
            bad += a2 * b2 != a * b
            a, b = a2, b2
    el = time.perf_counter() - t
    record("AC10 chart atlas", bad == 0, f"{bad} exact-identity failures", el, 1.0)


def test_ac11_two_routes():
    t = time.perf_counter()
    worst = 0.0
    for k, c in enumerate([GeometryConfig(0.0, (0.0,)), GeometryConfig(1.0, (0.0,)),
                           GeometryConfig(0.7, (0.0,))]):
        rng = rng_for(140 + k)
        pts = sample_points(c, rng, 200, min_rho=0.05)
        for q in _phi(rng, pts):
            g = metric_real(c, q)
            s = max(1.0, float(np.max(np.abs(g))))
            worst = max(worst, float(np.max(np.abs(metric_z_chart_real(c, q) - g))) / s)
            a, b = z_to_ab(*to_z_coords(c, q))
            hab = metric_ab_chart(c, q).to_plain(a, b).matrix()
            hn = metric_n1(c.epsilon, a, b).matrix()
            worst = max(worst, float(np.max(np.abs(hab - hn))) / max(1.0, np.max(np.abs(hab))))
    el = time.perf_counter() - t
    record("AC11 two routes", worst < 1e-8, f"max deviation {worst:.2e} < 1e-8", el, 5.0)


def test_ac12_signature_phase():
    cfg = GeometryConfig(-1.0, (0.0,))
    t = time.perf_counter()
    rec = check_signature(cfg, rng_for(150), 500, 0.0)
    lo, hi = 0.5, 2.0
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if classify_phase(cfg, (mid, 0.0, 0.0), delta=1e-12).phase is Phase.PLUS:
            lo = mid
        else:
            hi = mid
    thr = 0.5 * (lo + hi)
    el = time.perf_counter() - t
    record("AC12 signature theorem", rec.passed and abs(thr - 1.0) < 1e-5,
           f"{int(rec.max_residual)} wrong signs in {rec.samples} points, "
           f"threshold r = {thr:.9f} (|r - 1/a| < 1e-5)", el, 5.0)


def test_ac13_determinism_and_schemas(tmp_path, capsys):
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(json.dumps({"epsilon": 1.0, "centers": [0.0, 1.0]}))
    neg_path = tmp_path / "n.json"
    neg_path.write_text(json.dumps({"epsilon": -1.0, "centers": [0.0]}))
    t = time.perf_counter()
    runs = []
    for k in range(2):
        d = tmp_path / f"r{k}"
        codes = [
            main(["verify", "--config", str(cfg_path), "--samples", "10", "--seed", "7",
                  "--suites", "harmonicity,inverse_pair,roundtrip,atlas", "--out", str(d)]),
            main(["moment-image", "--config", str(cfg_path), "--mu1-range=-2:2",
                  "--steps", "200", "--out", str(d)]),
            main(["moment-image", "--config", str(cfg_path), "--mu1-range=-2:2",
                  "--steps", "200", "--format", "json", "--out", str(d)]),
        ]
        runs.append((codes, {p.name: p.read_bytes() for p in d.iterdir()}))
    same = runs[0] == runs[1] and runs[0][0] == [0, 0, 0]
    capsys.readouterr()
    main(["moment-image", "--config", str(cfg_path), "--mu1-range=-2:1", "--steps", "3"])
    g1 = capsys.readouterr().out == (GOLDEN / "moment_image_eps1_c01_steps3.csv").read_text()
    main(["phase-map", "--config", str(neg_path), "--grid", "3", "--rho-range", "0:2",
          "--z-range=-2:2"])
    g2 = capsys.readouterr().out == (GOLDEN / "phase_map_eps-1_grid3.csv").read_text()
    el = time.perf_counter() - t
    record("AC13 determinism/schemas", same and g1 and g2,
           f"byte-identical reruns: {same}, golden moment-image: {g1}, golden phase-map: {g2}",
           el, 5.0)
