"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 when a verified inequality
fails (negative discretization margin, failed cube property).
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings

import numpy as np

from . import io as cio
from .dyadic import build_dyadic, verify_properties
from .errors import CCPoincareError
from .fields import get_field_family
from .operators import (Kernel, PhiFunctional, default_c, discretize_bound_check,
                        family_balls)
from .operators.potential import discretization_c
from .orlicz import bp_condition_check, orlicz_maximal, parse_young
from .poincare import (TestFunctionFamily, bilinear_ramp_scan, default_r0, exponent_arithmetic,
                       linear_failure_demo, refinement_entries, representation_check,
                       verify_theorem)
from .space import Ball
from .weights import WeightSystem, check_orlicz_condition, check_power_condition

COMMANDS = ("build-space", "dyadic", "check-weights", "potential", "verify-poincare",
            "representation", "failure-demo", "orlicz-check")
MARGIN_TOL = 1e-12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def make_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, allow_abbrev=False)
    common.add_argument("--space", default="grid:1d:65")
    common.add_argument("--fields", default=None)
    common.add_argument("--alpha", type=float, default=1.0)
    common.add_argument("--m", type=int, default=1)
    common.add_argument("--p", type=float, default=None)
    common.add_argument("--q", type=float, default=None)
    common.add_argument("--p_i", type=_float_list, default=None)
    common.add_argument("--t", type=float, default=2.0)
    common.add_argument("--young", default=None)
    common.add_argument("--weights", default=None)
    common.add_argument("--variant", default=None)
    common.add_argument("--trials", type=int, default=20)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--refine", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--radius", type=float, default=None)
    common.add_argument("--eps", default="2^-3..2^-8")
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("json", "csv"), default=None)
    parser = _Parser(prog="ccpoincare", allow_abbrev=False,
                     description="Experiments with multilinear potential operators and "
                                 "Poincaré inequalities on spaces of homogeneous type.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], allow_abbrev=False)
    return parser


# helpers ------------------------------------------------------------------------

def _grid_required(grid, command):
    if grid is None:
        raise UsageError(f"{command} needs a grid space (grid:... or cc:...)")
    return grid


def _central_ball(space, grid, radius):
    c = grid.nearest_index((np.array(grid.lo) + np.array(grid.hi)) / 2)
    if radius is None:
        radius = float(space.dist[c].max() + space.radius_eps)
    return Ball(c, radius)


def _fields(args, grid):
    if args.fields:
        return get_field_family(args.fields)
    # cc:<kind>:<size> spaces carry their own fields
    kind = args.space.split(":")[1] if args.space.startswith("cc:") else "euclidean"
    return get_field_family(f"euclidean:{grid.ndim}" if kind == "euclidean" else kind)


def _exponents(args, n):
    return exponent_arithmetic(n, args.m, p=args.p, q=args.q, p_i=args.p_i)


def _weights(args, points, ex) -> WeightSystem:
    if args.weights:
        return cio.load_weights(args.weights, points)
    ones = np.ones(len(points))
    return WeightSystem(ones, tuple(ones for _ in range(ex.m)), ex.p, ex.q, ex.p_i, args.t)


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "out"}


def _emit(text: str, args):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _ball_dict(space, ball):
    return {"center": int(ball.center), "radius": float(ball.radius),
            "center_point": space.points[ball.center].tolist()}


# commands ---------------------------------------------------------------------------

def cmd_build_space(args):
    space, grid = cio.build_space(args.space, args.fields)
    data = cio.space_to_dict(space)
    data["config"] = _config(args)
    _emit(cio.write_report(data, None), args)
    return 0


def cmd_dyadic(args):
    space, _ = cio.build_space(args.space, args.fields)
    tree = build_dyadic(space)
    rep = verify_properties(tree, space)
    data = {"config": _config(args), "space_digest": space.digest(), "tree": tree.to_dict(),
            "a0": rep.a0, "a1": rep.a1, "passed": rep.passed,
            "properties": {r.name: {"passed": r.passed, "witness": r.witness} for r in rep.results}}
    _emit(cio.write_report(data, None), args)
    return 0 if rep.passed else 2


def _phi_for(space, m, alpha, family):
    K = Kernel.cc_alpha(alpha, m)
    return PhiFunctional(K, default_c(space, family_balls(family), m))


def cmd_check_weights(args):
    if not args.weights or not args.variant:
        raise UsageError("check-weights needs --weights and --variant")
    space, _ = cio.build_space(args.space, args.fields)
    ws = cio.load_weights(args.weights, space.points)
    fam = space.ball_family()
    variant = args.variant.replace("≤", "<=")
    if variant.startswith("orlicz"):
        res = check_orlicz_condition(space, _phi_for(space, ws.m, args.alpha, fam), ws, family=fam)
    else:
        phi = _phi_for(space, ws.m, args.alpha, fam) if variant.startswith("general") else None
        res = check_power_condition(space, ws, variant, phi=phi, alpha=args.alpha, family=fam)
    data = {"config": _config(args), "space_digest": space.digest(), "variant": res.variant,
            "sup": res.value, "finite": math.isfinite(res.value),
            "witness": None if res.ball is None else _ball_dict(space, res.ball)}
    _emit(cio.write_report(data, None), args)
    return 0


def cmd_potential(args):
    space, _ = cio.build_space(args.space, args.fields)
    tree = build_dyadic(space)
    phi = PhiFunctional(Kernel.cc_alpha(args.alpha, args.m), discretization_c(tree))
    rng = np.random.default_rng(args.seed)
    margins = []
    for _ in range(args.trials):
        fs = [rng.random(space.n) for _ in range(args.m)]
        margins.append(discretize_bound_check(space, tree, phi, fs).margin)
    worst = min(margins) if margins else 0.0
    data = {"config": _config(args), "space_digest": space.digest(), "c": phi.c,
            "margins": margins, "min_margin": worst, "holds": worst >= -MARGIN_TOL}
    _emit(cio.write_report(data, None), args)
    return 0 if worst >= -MARGIN_TOL else 2


def _poincare_once(args, spec_grid_space, ex):
    space, grid = spec_grid_space
    fields = _fields(args, grid)
    ws = _weights(args, grid.points(), ex)
    ball = _central_ball(space, grid, args.radius)
    r0 = default_r0(grid) if args.radius is not None else ball.radius
    variant = "theorem1_q>1" if ws.q > 1 else "theorem1_q<=1"
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cond = check_power_condition(space, ws, variant, center_mask=space.ball_mask(ball))
        pinned = [[lambda x: x[:, 0]] + [lambda x: np.ones(len(x))] * (ex.m - 1)]
        rep = verify_theorem(space, grid, fields, ws, ball, TestFunctionFamily("polynomial", ex.m),
                             trials=args.trials, seed=args.seed, condition=cond, r0=r0,
                             pinned=pinned)
    return rep, [str(w.message) for w in caught]


def cmd_verify_poincare(args):
    space, grid = cio.build_space(args.space, args.fields)
    grid = _grid_required(grid, "verify-poincare")
    ex = _exponents(args, grid.ndim)
    rep, notes = _poincare_once(args, (space, grid), ex)
    grids, reports = [grid], [rep]
    for _ in range(args.refine):
        g = grids[-1].refine()
        sp = _respace(args, g)
        grids.append(g)
        reports.append(_poincare_once(args, (sp, g), ex)[0])
    rep.refinement = refinement_entries(grids, reports)
    if (args.format or "json") == "csv":
        _emit(rep.to_csv(), args)
    else:
        data = rep.to_dict()
        data.update(config=_config(args), pinned_ratio=rep.ratios[0], warnings=notes)
        _emit(cio.write_report(data, None), args)
    return 0


def _respace(args, grid):
    from .fields import cc_distance_matrix
    from .space import DiscreteSpace
    fam = _fields(args, grid)
    if fam.name.startswith("euclidean"):
        return DiscreteSpace.from_grid(grid, label=args.space)
    return cc_distance_matrix(fam, grid)


def cmd_representation(args):
    space, grid = cio.build_space(args.space, args.fields)
    grid = _grid_required(grid, "representation")
    grids = [grid]
    for _ in range(args.refine):
        grids.append(grids[-1].refine())
    fam = TestFunctionFamily("polynomial", args.m)
    rng = np.random.default_rng(args.seed)
    draws = [fam.draw(rng, grid) for _ in range(args.trials)]
    trace = []
    for k, g in enumerate(grids):
        sp = space if k == 0 else _respace(args, g)
        fields = _fields(args, g)
        radius = args.radius if args.radius is not None else default_r0(g)
        ball = _central_ball(sp, g, radius)
        Cs, viol = [], 0
        for funcs in draws:
            r = representation_check(sp, g, fields, ball, [g.evaluate(f) for f in funcs])
            Cs.append(r.C)
            viol += len(r.violations)
        trace.append({"h": float(np.max(g.spacing)), "max_C": max(Cs), "C": Cs,
                      "violation_candidates": viol})
    data = {"config": _config(args), "space_digest": space.digest(), "refinement": trace,
            "max_C": trace[0]["max_C"]}
    _emit(cio.write_report(data, None), args)
    return 0


def cmd_failure_demo(args):
    if args.p is None:
        raise UsageError("failure-demo needs --p")
    eps = cio.parse_schedule(args.eps)
    rep = linear_failure_demo(args.p, eps, q=args.q)
    if (args.format or "csv") == "csv":
        _emit(rep.to_csv(), args)
    else:
        data = {"config": _config(args), "eps": rep.eps, "lhs": rep.lhs, "rhs": rep.rhs,
                "ratio": rep.ratio, "slope": rep.slope, "expected_slope": rep.expected_slope,
                "q": rep.q}
        if args.m == 2:
            scan = bilinear_ramp_scan(eps=eps)
            data["bilinear"] = {"ratios": scan.ratios, "spread": scan.spread}
        _emit(cio.write_report(data, None), args)
    return 0


def cmd_orlicz_check(args):
    if not args.young:
        raise UsageError("orlicz-check needs --young")
    psi = parse_young(args.young)
    p = args.p if args.p is not None else 2.0
    direct = bp_condition_check(psi, p, form="direct")
    dual = bp_condition_check(psi, p, form="dual")
    C, N = psi.doubling()
    data = {"config": _config(args), "young": psi.label, "is_young": psi.is_young(),
            "doubling": {"C": C, "N": N},
            "direct": {"verdict": direct.verdict, "ratios": direct.ratios[-5:]},
            "dual": {"verdict": dual.verdict, "ratios": dual.ratios[-5:]}}
    if args.space and args.trials:
        space, _ = cio.build_space(args.space, args.fields)
        rng = np.random.default_rng(args.seed)
        f = rng.random(space.n)
        data["maximal_max"] = float(orlicz_maximal(space, f, psi).max())
    _emit(cio.write_report(data, None), args)
    return 0


HANDLERS = {"build-space": cmd_build_space, "dyadic": cmd_dyadic,
            "check-weights": cmd_check_weights, "potential": cmd_potential,
            "verify-poincare": cmd_verify_poincare, "representation": cmd_representation,
            "failure-demo": cmd_failure_demo, "orlicz-check": cmd_orlicz_check}


def run(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        return HANDLERS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (CCPoincareError, OSError) as exc:
        print(f"ccpoincare: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
