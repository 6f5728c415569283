"""Empirical constant of the pointwise representation formula under refinement.

    python scripts/representation_refinement.py --m 2
"""
import argparse
import json

import numpy as np

from ccpoincare.fields import cc_distance_matrix, euclidean_fields, grushin_fields
from ccpoincare.grid import GridSpec
from ccpoincare.poincare import TestFunctionFamily, representation_check
from ccpoincare.space import Ball, DiscreteSpace


def constants(grids, space_of, fields, radius, draws):
    out = []
    for g in grids:
        sp = space_of(g)
        ball = Ball(g.nearest_index((np.array(g.lo) + np.array(g.hi)) / 2), radius)
        out.append(max(representation_check(sp, g, fields, ball, [g.evaluate(f) for f in fs]).C
                       for fs in draws))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    fam = TestFunctionFamily("polynomial", args.m)
    line = [GridSpec.uniform(n, 1) for n in (41, 81)]
    plane = [GridSpec((-1.0, -1.0), (1.0, 1.0), (n, n)) for n in (25, 49)]
    report = {}
    for name, grids, space_of, fields, radius in (
            ("euclidean_1d", line, DiscreteSpace.from_grid, euclidean_fields(1), 1.0),
            ("grushin", plane, lambda g: cc_distance_matrix(grushin_fields(), g), grushin_fields(), 0.6)):
        draws = [fam.draw(rng, grids[0]) for _ in range(args.trials)]
        Cs = constants(grids, space_of, fields, radius, draws)
        report[name] = {"sizes": [g.shape[0] for g in grids], "C": Cs,
                        "relative_change": abs(Cs[1] / Cs[0] - 1)}
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
