"""Command-line front end.

Negative numbers in list-valued flags need the ``=`` form, e.g.
``--mu1-range=-2:2`` or ``--point=0,-1,0.5``.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .core import (ConfigError, GeometryConfig, Phase, RealChartPoint, TaubNutError,
                   load_config, validate_config)
from .emit import (RunManifest, csv_text, json_text, svg_phase_map, svg_polylines,
                   write_artifact)
from .fields import (NoPositiveRoot, classify_phase, eval_alpha, eval_potential, solve_pa)
from .hessian import complex_potential, kahler_potential, symplectic_to_cylindrical
from .holomorphic import (holomorphic_point, metric_ab_chart, metric_n1, metric_z_chart,
                          real_point_from_ab, to_z_coords)
from .moment import convexity_experiment, sample_boundary
from .numerics import FDSettings, SolverError
from .realchart import metric_real, ricci_tensor_fd
from .verify import DEFAULT_TOLERANCES, SUITES, flip_alpha, run_check, run_verification


class UsageError(Exception):
    pass


# --- argument parsing helpers ---------------------------------------------------------

def _floats(text: str, n: int, what: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != n:
        raise UsageError(f"{what} needs {n} comma-separated numbers, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"{what}: could not parse {text!r}") from None


def _range(text: str, what: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"{what} must look like lo:hi, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"{what}: could not parse {text!r}") from None
    if not lo < hi:
        raise UsageError(f"{what}: need lo < hi")
    return lo, hi


def _config(args) -> GeometryConfig:
    if args.config is not None:
        return load_config(args.config)
    if args.epsilon is None or args.centers is None:
        raise UsageError("give --config <json> or both --epsilon and --centers")
    try:
        centers = [float(c) for c in args.centers.split(",")]
    except ValueError:
        raise UsageError(f"could not parse centers {args.centers!r}") from None
    return validate_config(centers, args.epsilon)


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, Phase):
        return v.value
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _manifest(args, config, command, parameters, tolerances=None) -> RunManifest:
    return RunManifest(config, command, parameters, args.seed, tolerances or {})


def _emit(args, stem: str, fmt: str, text: str, manifest: RunManifest) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    for p in write_artifact(Path(args.out), stem, fmt, text, manifest):
        print(p, file=sys.stderr)


def _emit_json(args, stem, doc, manifest):
    doc = dict(doc)
    doc["manifest"] = manifest.to_dict()
    if args.out is not None:
        manifest.outputs = [f"{stem}.json"]
        doc["manifest"] = manifest.to_dict()
    _emit(args, stem, "json", json_text(_jsonable(doc)), manifest)


# --- commands -----------------------------------------------------------------------

def cmd_verify(args) -> int:
    config = _config(args)
    suites = None if args.suites == "all" else args.suites.split(",")
    tols = {}
    for item in args.tol or []:
        name, _, value = item.partition("=")
        if name not in DEFAULT_TOLERANCES or not value:
            raise UsageError(f"bad --tol {item!r}; names: {', '.join(SUITES)}")
        tols[name] = float(value)
    hooks = {"alpha": flip_alpha} if args.corrupt_alpha else None
    manifest = _manifest(args, config, "verify",
                         {"suites": args.suites, "samples": args.samples})
    try:
        report = run_verification(config, suites, args.samples, args.seed, tols, args.jobs,
                                  hooks=hooks)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    manifest.tolerances = report.manifest["tolerances"]
    report.manifest = manifest.to_dict()
    if args.out is not None:
        manifest.outputs = ["verify_report.json"]
        report.manifest = manifest.to_dict()
    _emit(args, "verify_report", "json", json_text(report.to_dict()), manifest)
    return 0 if report.overall_pass else 1


def cmd_field(args) -> int:
    config = _config(args)
    x, y, z = _floats(args.point, 3, "--point")
    doc = {"point": [x, y, z]}
    if args.kind == "V":
        pv = eval_potential(config, (x, y, z))
        doc.update(V=pv.V, r=list(pv.per_center_r))
    elif args.kind == "alpha":
        a = eval_alpha(config, (x, y, z))
        doc.update(alpha=[a.a_x, a.a_y, 0.0])
    else:
        label = classify_phase(config, (x, y, z), args.delta)
        doc.update(phase=label.phase.value, V=label.value, delta=label.delta)
    _emit_json(args, f"field_{args.kind}", doc, _manifest(args, config, "field", vars_of(args)))
    return 0


def _hermitian_doc(h):
    return {"h11": h.h11, "h12": h.h12, "h22": h.h22, "matrix": h.matrix(),
            "eigenvalues": list(h.eigenvalues())}


def cmd_metric(args) -> int:
    config = _config(args)
    phase = args.phase
    if args.chart == "n1":
        if args.at is None:
            raise UsageError("--chart n1 needs --at a_re,a_im,b_re,b_im")
        if config.n != 1 or config.centers[0] != 0.0:
            raise UsageError("--chart n1 needs a single center at the origin")
        ar, ai, br, bi = _floats(args.at, 4, "--at")
        h = metric_n1(config.epsilon, complex(ar, ai), complex(br, bi), phase, args.side)
        doc = {"chart": "n1", "at": [ar, ai, br, bi], **_hermitian_doc(h)}
    else:
        if args.point is not None:
            q = RealChartPoint(*_floats(args.point, 4, "--point"))
        elif args.at is not None:
            ar, ai, br, bi = _floats(args.at, 4, "--at")
            q = real_point_from_ab(config, complex(ar, ai), complex(br, bi), phase, args.side)
        else:
            raise UsageError("give --point phi,x,y,z or --at a_re,a_im,b_re,b_im")
        doc = {"chart": args.chart, "point": [q.phi, q.x, q.y, q.z]}
        if args.chart == "real":
            doc["metric"] = metric_real(config, q)
        elif args.chart == "z":
            doc.update(_hermitian_doc(metric_z_chart(config, q)))
        else:
            doc.update(_hermitian_doc(metric_ab_chart(config, q)))
    _emit_json(args, f"metric_{args.chart}", doc, _manifest(args, config, "metric", vars_of(args)))
    return 0


def cmd_coords(args) -> int:
    config = _config(args)
    q = RealChartPoint(*_floats(args.point, 4, "--point"))
    if args.to == "z":
        z1, z2 = to_z_coords(config, q)
        doc = {"z1": z1, "z2": z2}
    else:
        hp = holomorphic_point(config, q, args.chart)
        doc = {"chart": hp.chart, "alpha": hp.alpha, "beta": hp.beta}
    _emit_json(args, f"coords_{args.to}", doc, _manifest(args, config, "coords", vars_of(args)))
    return 0


def cmd_potential(args) -> int:
    config = _config(args)
    mu1, mu2 = _floats(args.mu, 2, "--mu")
    rho, z = symplectic_to_cylindrical(config, mu1, mu2)
    fn = complex_potential if args.kind == "psi" else kahler_potential
    value = fn(config, (rho, z), args.C1, args.C2)
    doc = {"kind": args.kind, "mu": [mu1, mu2], "rho": rho, "z": z, "value": value}
    _emit_json(args, f"potential_{args.kind}", doc,
               _manifest(args, config, "potential", vars_of(args)))
    return 0


def cmd_curvature(args) -> int:
    config = _config(args)
    q = RealChartPoint(*_floats(args.point, 4, "--point"))
    settings = FDSettings(h=args.h, order=args.order, richardson=args.richardson)
    ric = ricci_tensor_fd(config, q, settings)
    doc = {"point": [q.phi, q.x, q.y, q.z], "ricci": ric, "max_abs": float(np.max(np.abs(ric)))}
    _emit_json(args, "curvature", doc, _manifest(args, config, "curvature", vars_of(args)))
    return 0


def cmd_moment_image(args) -> int:
    config = _config(args)
    lo, hi = _range(args.mu1_range, "--mu1-range")
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    fmt = args.format or "csv"
    manifest = _manifest(args, config, "moment-image",
                         {"mu1_range": [lo, hi], "steps": args.steps, "format": fmt})
    pieces = []
    notes = []
    for pid, arr in sample_boundary(config, (lo, hi), args.steps):
        if len(arr) == 0:
            notes.append(f"piece {pid} empty, skipped")
            continue
        pieces.append((pid, arr))
    for n in notes:
        print(n, file=sys.stderr)
    if fmt == "csv":
        rows = [(pid, float(m1), float(m2)) for pid, arr in pieces for m1, m2 in arr]
        text = csv_text(["piece_id", "mu1", "mu2"], rows)
    elif fmt == "json":
        if args.out is not None:
            manifest.outputs = ["moment_image.json"]
        doc = {"manifest": manifest.to_dict(), "notes": notes,
               "pieces": [{"piece_id": pid, "mu1": arr[:, 0].tolist(), "mu2": arr[:, 1].tolist()}
                          for pid, arr in pieces]}
        text = json_text(doc)
    else:
        if args.out is not None:
            manifest.outputs = ["moment_image.svg"]
        text = svg_polylines([(pid, arr.tolist()) for pid, arr in pieces],
                             f"moment image, eps={config.epsilon}", manifest)
    _emit(args, "moment_image", fmt, text, manifest)
    return 0


def phase_map_data(config: GeometryConfig, rho_range, z_range, grid: int, delta: float = 1e-9):
    """Grid labels (rows indexed by z) and the boundary curve (rho, z) with rho^2 = p_a(z)."""
    rho = np.linspace(*rho_range, grid)
    zs = np.linspace(*z_range, grid)
    labels = []
    for z in zs:
        row = []
        for r in rho:
            try:
                row.append(classify_phase(config, (float(r), 0.0, float(z)), delta).phase.value)
            except TaubNutError:
                row.append("singular")
        labels.append(row)
    curve = []
    for z in zs:
        try:
            curve.append((math.sqrt(solve_pa(config, float(z))), float(z)))
        except (NoPositiveRoot, SolverError):
            continue
    return rho, zs, labels, curve


def cmd_phase_map(args) -> int:
    config = _config(args)
    if not config.epsilon < 0:
        raise UsageError("phase-map needs epsilon < 0")
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    rr = _range(args.rho_range, "--rho-range")
    if rr[0] < 0:
        raise UsageError("--rho-range must be non-negative")
    zr = _range(args.z_range, "--z-range")
    fmt = args.format or "csv"
    manifest = _manifest(args, config, "phase-map",
                         {"rho_range": list(rr), "z_range": list(zr), "grid": args.grid,
                          "format": fmt})
    rho, zs, labels, curve = phase_map_data(config, rr, zr, args.grid)
    if fmt == "csv":
        rows = [(float(r), float(z), labels[j][i])
                for j, z in enumerate(zs) for i, r in enumerate(rho)]
        text = csv_text(["rho", "z", "phase"], rows)
    elif fmt == "json":
        if args.out is not None:
            manifest.outputs = ["phase_map.json"]
        text = json_text({"manifest": manifest.to_dict(), "rho": rho.tolist(), "z": zs.tolist(),
                          "labels": labels, "boundary": [list(p) for p in curve]})
    else:
        if args.out is not None:
            manifest.outputs = ["phase_map.svg"]
        text = svg_phase_map(rho.tolist(), zs.tolist(), labels, curve,
                             f"phase map, eps={config.epsilon}", manifest)
    _emit(args, "phase_map", fmt, text, manifest)
    return 0


def cmd_convexity(args) -> int:
    config = _config(args)
    if not config.epsilon < 0:
        raise UsageError("convexity needs epsilon < 0")
    lo, hi = _range(args.mu1_range, "--mu1-range")
    report = convexity_experiment(config, (lo, hi), args.grid, args.tol_zero)
    _emit_json(args, "convexity", report, _manifest(args, config, "convexity", vars_of(args)))
    return 0


def cmd_check(args) -> int:
    config = _config(args)
    rec = run_check("hessian", config, args.samples, args.seed, args.tol)
    manifest = _manifest(args, config, "check hessian", vars_of(args), {"hessian": args.tol})
    _emit_json(args, "check_hessian", asdict(rec), manifest)
    return 0 if rec.passed else 1


def vars_of(args) -> dict:
    skip = {"func", "command", "config", "epsilon", "centers", "seed", "out", "jobs"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# --- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="geometry config JSON")
    common.add_argument("--epsilon", type=float, help="inline config: epsilon")
    common.add_argument("--centers", help="inline config: comma-separated centers")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--format", choices=["csv", "json", "svg"])
    common.add_argument("--out", help="output directory (default: stdout)")

    p = argparse.ArgumentParser(prog="taubnut", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify", parents=[common], help="run verification suites")
    s.add_argument("--suites", default="all", help="comma-separated suite names or 'all'")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--tol", action="append", metavar="NAME=VALUE")
    s.add_argument("--corrupt-alpha", action="store_true", help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("field", parents=[common], help="V, alpha or phase at a point")
    s.add_argument("kind", choices=["V", "alpha", "phase"])
    s.add_argument("--point", required=True, help="x,y,z")
    s.add_argument("--delta", type=float, default=1e-9)
    s.set_defaults(func=cmd_field)

    s = sub.add_parser("metric", parents=[common], help="metric components in a chart")
    s.add_argument("--chart", choices=["real", "z", "ab", "n1"], default="real")
    s.add_argument("--point", help="phi,x,y,z")
    s.add_argument("--at", help="a_re,a_im,b_re,b_im")
    s.add_argument("--phase", choices=["plus", "minus"])
    s.add_argument("--side", choices=["upper", "lower"])
    s.set_defaults(func=cmd_metric)

    s = sub.add_parser("coords", parents=[common], help="holomorphic coordinates of a point")
    s.add_argument("--to", choices=["z", "ab"], required=True)
    s.add_argument("--point", required=True, help="phi,x,y,z")
    s.add_argument("--chart", type=int, default=1)
    s.set_defaults(func=cmd_coords)

    s = sub.add_parser("potential", parents=[common], help="psi or psi-dual at a moment point")
    s.add_argument("kind", choices=["psi", "psi-dual"])
    s.add_argument("--mu", required=True, help="mu1,mu2")
    s.add_argument("--C1", type=float, default=0.0)
    s.add_argument("--C2", type=float, default=0.0)
    s.set_defaults(func=cmd_potential)

    s = sub.add_parser("curvature", parents=[common], help="finite-difference Ricci tensor")
    s.add_argument("--point", required=True, help="phi,x,y,z")
    s.add_argument("--h", type=float, default=1e-3)
    s.add_argument("--order", type=int, choices=[2, 4], default=4)
    s.add_argument("--richardson", action="store_true")
    s.set_defaults(func=cmd_curvature)

    s = sub.add_parser("moment-image", parents=[common], help="moment image boundary pieces")
    s.add_argument("--mu1-range", required=True, help="lo:hi")
    s.add_argument("--steps", type=int, default=200)
    s.set_defaults(func=cmd_moment_image)

    s = sub.add_parser("phase-map", parents=[common], help="sign of V on a (rho, z) grid")
    s.add_argument("--rho-range", default="0:2")
    s.add_argument("--z-range", default="-2:2")
    s.add_argument("--grid", type=int, default=81)
    s.set_defaults(func=cmd_phase_map)

    s = sub.add_parser("convexity", parents=[common], help="convexity statistics (eps < 0)")
    s.add_argument("--mu1-range", required=True, help="lo:hi")
    s.add_argument("--grid", type=int, default=401)
    s.add_argument("--tol-zero", type=float, default=1e-9)
    s.set_defaults(func=cmd_convexity)

    s = sub.add_parser("check", parents=[common], help="single identity checks")
    s.add_argument("which", choices=["hessian"])
    s.add_argument("--samples", type=int, default=50)
    s.add_argument("--tol", type=float, default=DEFAULT_TOLERANCES["hessian"])
    s.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, OSError) as exc:
        print(f"taubnut {args.command}: {exc}", file=sys.stderr)
        return 2
    except (TaubNutError, SolverError, ValueError) as exc:
        print(f"taubnut {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
