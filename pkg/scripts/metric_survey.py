"""Dyadic cube constants and CC metric checks on the built-in spaces.

    python scripts/metric_survey.py
"""
import json
import time

import numpy as np

from ccpoincare.dyadic import build_dyadic, verify_properties
from ccpoincare.fields import comparability_check
from ccpoincare.io import build_space


def main():
    rows = []
    for spec in ("cc:grushin:21", "cc:heisenberg:0.5", "cc:euclidean:21", "random:2d:300:0"):
        t0 = time.perf_counter()
        sp, grid = build_space(spec)
        tree = build_dyadic(sp)
        rep = verify_properties(tree, sp)
        row = {"space": spec, "points": sp.n, "kappa": sp.kappa, "A": tree.A,
               "levels": len(tree.level_indices), "a0": rep.a0, "a1": rep.a1,
               "properties_pass": rep.passed}
        if grid is not None:
            comp = comparability_check(sp, 2)
            row["comparability"] = {"C1": comp.C1, "C2": comp.C2, "finite": comp.finite}
        row["seconds"] = round(time.perf_counter() - t0, 2)
        rows.append(row)
    print(json.dumps(rows, indent=2, default=lambda v: v.item() if isinstance(v, np.generic) else str(v)))


if __name__ == "__main__":
    main()
