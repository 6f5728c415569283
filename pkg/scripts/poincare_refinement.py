"""Weighted bilinear Poincare ratios on Grushin grids under refinement.

    python scripts/poincare_refinement.py --sizes 25,49 --trials 200
"""
import argparse
import json
import time
import warnings

import numpy as np

from ccpoincare.fields import cc_distance_matrix, grushin_fields
from ccpoincare.grid import GridSpec
from ccpoincare.poincare import TestFunctionFamily, verify_theorem
from ccpoincare.space import Ball
from ccpoincare.weights import WeightSystem, check_power_condition


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="25,49")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--radius", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    out = []
    for n in map(int, args.sizes.split(",")):
        t0 = time.perf_counter()
        g = GridSpec((-1.0, -1.0), (1.0, 1.0), (n, n))
        sp = cc_distance_matrix(grushin_fields(), g)
        x, y = g.points().T
        ws = WeightSystem.from_exponents(1 + 0.2 * x ** 2, [1 + 0.1 * y] * 2, (4.0, 4.0), 2.0, t=2.0)
        ball = Ball(g.nearest_index([0.0, 0.0]), args.radius)
        cond = check_power_condition(sp, ws, "theorem1_q>1", center_mask=sp.ball_mask(ball))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = verify_theorem(sp, g, grushin_fields(), ws, ball,
                                 TestFunctionFamily("polynomial", 2), trials=args.trials,
                                 seed=args.seed, condition=cond, r0=args.radius)
        out.append({"n": n, "condition_sup": cond.value, "max_ratio": rep.max_ratio,
                    "quantiles": rep.quantiles, "seconds": round(time.perf_counter() - t0, 2)})
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
