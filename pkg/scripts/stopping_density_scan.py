"""Measured stopping-time density gamma against the stopping base a.

Draws random bump products on a uniform line and reports, for each base
(the default one first), how many trials end with gamma = 0.

    python scripts/stopping_density_scan.py --n 320 --trials 100
"""
import argparse
import json

import numpy as np

from ccpoincare.dyadic import build_dyadic
from ccpoincare.grid import GridSpec
from ccpoincare.operators import default_stopping_base, stopping_decomposition
from ccpoincare.space import DiscreteSpace


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=320)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--bases", default="16,32,64,128")
    args = ap.parse_args()

    sp = DiscreteSpace.from_grid(GridSpec.uniform(args.n, 1))
    tree = build_dyadic(sp)
    x = sp.points[:, 0]
    rng = np.random.default_rng(args.seed)
    trials = []
    for t in range(args.trials):
        fs = []
        for _ in range(1 + t % 2):
            c, w = rng.uniform(0.25, 0.75), rng.uniform(0.05, 0.4)
            fs.append(np.maximum(0.0, 1 - np.abs(x - c) / w) / w)
        trials.append(fs)

    rows = []
    for label in ["default"] + args.bases.split(","):
        by_m = {}
        for fs in trials:
            a = None if label == "default" else float(label)
            by_m.setdefault(len(fs), []).append(stopping_decomposition(tree, sp, fs, a=a).gamma)
        for m, gammas in sorted(by_m.items()):
            a = default_stopping_base(tree, sp, m) if label == "default" else float(label)
            rows.append({"base": label, "a": a, "m": m, "trials": len(gammas),
                         "gamma_zero": int(sum(g == 0 for g in gammas)),
                         "min_gamma": float(min(gammas))})
    print(json.dumps(rows, indent=2))


if __name__ == "__main__":
    main()
