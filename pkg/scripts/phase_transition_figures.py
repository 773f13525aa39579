"""Moment images for epsilon = +1 and -1 (one center) and the epsilon = -1 phase map.

Writes SVG figures plus CSV data with manifest sidecars into --out.
"""
import argparse
from pathlib import Path

from taubnut.cli import phase_map_data
from taubnut.core import GeometryConfig
from taubnut.emit import RunManifest, csv_text, svg_phase_map, svg_polylines, write_artifact
from taubnut.moment import sample_boundary


def moment_figure(config, mu1_range, steps, out, stem):
    pieces = [(pid, arr.tolist()) for pid, arr in sample_boundary(config, mu1_range, steps)]
    params = {"mu1_range": list(mu1_range), "steps": steps}
    man = RunManifest(config, "scripts/phase_transition_figures.py", params, seed=0)
    rows = [(pid, float(x), float(y)) for pid, pts in pieces for x, y in pts]
    write_artifact(out, stem, "csv", csv_text(["piece_id", "mu1", "mu2"], rows), man)
    man = RunManifest(config, "scripts/phase_transition_figures.py", params, seed=0)
    man.outputs = [f"{stem}.svg"]
    title = f"moment image, epsilon = {config.epsilon:g}"
    write_artifact(out, stem, "svg", svg_polylines(pieces, title, man), man)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--grid", type=int, default=121)
    args = ap.parse_args(argv)

    moment_figure(GeometryConfig(1.0, (0.0,)), (-2.0, 2.0), args.steps, args.out, "moment_eps+1")
    moment_figure(GeometryConfig(-1.0, (0.0,)), (-2.0, 2.0), args.steps, args.out, "moment_eps-1")

    neg = GeometryConfig(-1.0, (0.0,))
    rho, zs, labels, curve = phase_map_data(neg, (0.0, 2.0), (-2.0, 2.0), args.grid)
    params = {"rho_range": [0.0, 2.0], "z_range": [-2.0, 2.0], "grid": args.grid}
    man = RunManifest(neg, "scripts/phase_transition_figures.py", params, seed=0)
    man.outputs = ["phase_map_eps-1.svg"]
    svg = svg_phase_map(list(rho), list(zs), labels, curve, "phases, epsilon = -1", man)
    write_artifact(args.out, "phase_map_eps-1", "svg", svg, man)
    counts = {}
    for row in labels:
        for lab in row:
            counts[lab] = counts.get(lab, 0) + 1
    print(f"wrote figures to {args.out}; phase cell counts {counts}")


if __name__ == "__main__":
    main()
