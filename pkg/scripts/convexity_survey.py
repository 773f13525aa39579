"""Survey the curvature of the positive-phase upper boundary for two centers and epsilon < 0.

Exploratory: reports second-difference sign counts, no claim is tested.
"""
import argparse
import json

import numpy as np

from taubnut.core import GeometryConfig
from taubnut.moment import convexity_experiment


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--epsilons", default="-0.25,-0.5,-1,-2")
    ap.add_argument("--separations", default="0.25,0.5,1,2")
    ap.add_argument("--grid", type=int, default=201)
    ap.add_argument("--json", action="store_true", help="print full reports as JSON")
    args = ap.parse_args(argv)

    rows = []
    for eps in map(float, args.epsilons.split(",")):
        for sep in map(float, args.separations.split(",")):
            cfg = GeometryConfig(eps, (-sep / 2, sep / 2))
            # the positive phase lives within a few 1/a of the centers
            reach = 2.0 / -eps + sep
            rep = convexity_experiment(cfg, (-reach, reach), args.grid)
            sd = rep["second_difference"]
            rows.append((eps, sep, len(rep["intervals"]), sd["positive"], sd["negative"],
                         sd["min"], sd["max"], rep))

    if args.json:
        print(json.dumps([r[-1] for r in rows], indent=2, sort_keys=True))
        return
    print(f"{'eps':>6} {'sep':>5} {'pieces':>6} {'d2>0':>6} {'d2<0':>6} {'min d2':>11} {'max d2':>11}")
    for eps, sep, k, pos, neg, lo, hi, _ in rows:
        fmt = lambda v: f"{v:11.4g}" if v is not None and np.isfinite(v) else f"{'-':>11}"
        print(f"{eps:6g} {sep:5g} {k:6d} {pos:6d} {neg:6d} {fmt(lo)} {fmt(hi)}")


if __name__ == "__main__":
    main()
