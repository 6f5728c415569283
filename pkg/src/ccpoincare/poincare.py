"""Numerical harness for multilinear subelliptic Poincaré inequalities.

Integrals are weighted point sums with the cell volume as weight.  Functions
under test are drawn as callables so the same function can be sampled on a
grid and on its refinement.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InputError, ParameterError
from .fields import FieldFamily, gradient_norm
from .grid import GridSpec
from .operators.kernels import Kernel
from .operators.potential import potential_operator_norm
from .space import Ball, DiscreteSpace
from .weights import ConditionResult, WeightSystem

Func = Callable[[np.ndarray], np.ndarray]


# exponents -------------------------------------------------------------------

@dataclass(frozen=True)
class Exponents:
    n: int
    m: int
    p: float
    q: float | None
    p_i: tuple | None
    r: float | None = None
    s: float | None = None

    def to_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "p": self.p, "q": self.q,
                "p_i": list(self.p_i) if self.p_i else None, "r": self.r, "s": self.s}


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


def exponent_arithmetic(n: int, m: int = 1, p: float | None = None, q: float | None = None,
                        r: float | None = None, s: float | None = None,
                        p_i: Sequence[float] | None = None) -> Exponents:
    """Complete an exponent tuple from partial data.

    p comes from 1/p = sum 1/p_i or 1/p = 1/r + 1/s; with m = 1, p_1 = p; with
    no p_i and m > 1 the split is equal.  A missing q is the Sobolev exponent
    np/(n - p).  Raises with the violated identity on inconsistent input.
    """
    if n < 1 or m < 1:
        raise ParameterError("n and m must be positive")
    cands = []
    if p_i is not None:
        p_i = tuple(float(x) for x in p_i)
        if len(p_i) != m:
            raise ParameterError(f"expected {m} exponents p_i, got {len(p_i)}")
        cands.append(("1/p = sum 1/p_i", 1.0 / sum(1.0 / x for x in p_i)))
    if r is not None and s is not None:
        cands.append(("1/p = 1/r + 1/s", 1.0 / (1.0 / r + 1.0 / s)))
    if p is not None:
        cands.append(("given p", float(p)))
    if not cands:
        raise ParameterError("need p, the p_i, or both r and s")
    p_val = cands[0][1]
    for name, val in cands[1:]:
        if not _close(val, p_val):
            raise ParameterError(f"inconsistent exponents: {cands[0][0]} gives {p_val}, "
                                 f"{name} gives {val}")
    if p_i is None:
        p_i = (p_val,) if m == 1 else (m * p_val,) * m
    # the linear case keeps the classical endpoint p = 1
    if not (p_val > 1.0 / m or (m == 1 and p_val >= 1.0)):
        raise ParameterError("need p > 1/m")
    if m > 1 and not all(1 < x < math.inf for x in p_i):
        raise ParameterError("need 1 < p_i < inf")
    if q is None:
        if p_val >= n:
            raise ParameterError("q = np/(n - p) needs p < n; give q explicitly")
        q = n * p_val / (n - p_val)
    q = float(q)
    if r is not None and s is not None and p_val < n and not _close(1 / q, 1 / r + 1 / s - 1 / n):
        warnings.warn(f"q = {q} differs from the Sobolev exponent of (r, s): "
                      f"1/r + 1/s - 1/n = {1 / r + 1 / s - 1 / n}", stacklevel=2)
    if q < p_val:
        raise ParameterError("need p <= q")
    return Exponents(n, m, p_val, q, p_i, r, s)


# test functions --------------------------------------------------------------

def ramp(eps: float, axis: int = 0) -> Func:
    """0 for x <= 0, x / eps on [0, eps], 1 for x >= eps (along one axis)."""
    if not 0 < eps < 1:
        raise ParameterError("ramp needs eps in (0, 1)")
    return lambda pts: np.clip(np.asarray(pts, dtype=float)[:, axis] / eps, 0.0, 1.0)


@dataclass(frozen=True)
class TestFunctionFamily:
    """Random or explicit test functions f_1..f_m.

    kind ``polynomial``: random coefficients in ``coef_range`` for every monomial
    of degree <= ``degree``; ``bump``: random amplitudes times Gaussians at
    ``centers`` (random in the box if omitted) with ``widths``; ``ramp``: the
    ramp of width ``eps`` along the first axis; ``explicit``: fixed callables.
    """

    __test__ = False  # not a pytest class

    kind: str
    m: int = 1
    degree: int = 2
    coef_range: tuple = (-1.0, 1.0)
    centers: tuple | None = None
    widths: tuple = (0.3,)
    eps: float | None = None
    funcs: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("polynomial", "bump", "ramp", "explicit"):
            raise ParameterError(f"unknown test-function kind {self.kind!r}")
        if self.kind == "ramp" and not (self.eps is not None and 0 < self.eps < 1):
            raise ParameterError("ramp family needs eps in (0, 1)")
        if self.kind == "explicit" and (self.funcs is None or len(self.funcs) != self.m):
            raise ParameterError("explicit family needs m callables")

    def draw(self, rng: np.random.Generator, grid: GridSpec) -> list[Func]:
        dim = grid.ndim
        lo, hi = self.coef_range
        if self.kind == "explicit":
            return list(self.funcs)
        if self.kind == "ramp":
            return [ramp(self.eps)] * self.m
        out = []
        for _ in range(self.m):
            if self.kind == "polynomial":
                powers = [pw for pw in np.ndindex(*(self.degree + 1,) * dim) if sum(pw) <= self.degree]
                coef = rng.uniform(lo, hi, len(powers))
                out.append(_polynomial(np.array(powers), coef))
            else:
                centers = (np.asarray(self.centers, dtype=float) if self.centers is not None
                           else rng.uniform(grid.lo, grid.hi, (3, dim)))
                widths = np.resize(np.asarray(self.widths, dtype=float), len(centers))
                amps = rng.uniform(lo, hi, len(centers))
                out.append(_bumps(centers, widths, amps))
        return out

    def sample(self, rng: np.random.Generator, grid: GridSpec) -> list[np.ndarray]:
        return [grid.evaluate(f) for f in self.draw(rng, grid)]


def _polynomial(powers: np.ndarray, coef: np.ndarray) -> Func:
    def f(pts):
        pts = np.asarray(pts, dtype=float)
        return np.prod(pts[:, None, :] ** powers[None, :, :], axis=2) @ coef
    return f


def _bumps(centers: np.ndarray, widths: np.ndarray, amps: np.ndarray) -> Func:
    def f(pts):
        d2 = ((np.asarray(pts, dtype=float)[:, None, :] - centers[None]) ** 2).sum(axis=2)
        return np.exp(-d2 / widths[None] ** 2) @ amps
    return f


# helpers ----------------------------------------------------------------------

def _mask_of(space: DiscreteSpace, ball) -> np.ndarray:
    if isinstance(ball, Ball):
        return space.ball_mask(ball)
    mask = np.asarray(ball, dtype=bool)
    if mask.shape != (space.n,):
        raise InputError("ball mask must have one entry per point")
    return mask


def _lp(values: np.ndarray, weights: np.ndarray, p: float) -> float:
    return float(np.sum(np.abs(values) ** p * weights) ** (1.0 / p))


def subspace(space: DiscreteSpace, mask: np.ndarray) -> DiscreteSpace:
    """The points of ``mask`` as a space of their own (metric and measure restricted)."""
    idx = np.flatnonzero(mask)
    return DiscreteSpace.from_metric(space.points[idx], space.measure[idx],
                                     space.dist[np.ix_(idx, idx)], kappa=space.kappa,
                                     label=f"{space.label}|sub")


def omega0_mask(grid: GridSpec, margin: float = 0.1) -> np.ndarray:
    """Points at distance >= margin * (box side) from every face."""
    pts = grid.points()
    lo, hi = np.array(grid.lo), np.array(grid.hi)
    gap = margin * (hi - lo)
    return np.all((pts >= lo + gap) & (pts <= hi - gap), axis=1)


def default_r0(grid: GridSpec, margin: float = 0.1) -> float:
    """A quarter of the inradius of the shrunken box."""
    lo, hi = np.array(grid.lo), np.array(grid.hi)
    return 0.25 * float(np.min((hi - lo) * (1 - 2 * margin)) / 2)


def _digest(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(np.asarray(a, dtype=float)).tobytes())
    return h.hexdigest()[:16]


# Hölder product bound ------------------------------------------------------------

def holder_product_bound(grid: GridSpec, field_family: FieldFamily, mask, f, g, p: float,
                         r: float, s: float, r_tilde: float | None = None,
                         s_tilde: float | None = None) -> tuple[float, float, float]:
    """(int_B |Y(fg)|^p)^{1/p} against ||Yf||_r ||g||_s + ||f||_r~ ||Yg||_s~."""
    r_tilde = r if r_tilde is None else r_tilde
    s_tilde = s if s_tilde is None else s_tilde
    for a, b in ((r, s), (r_tilde, s_tilde)):
        if not _close(1 / p, 1 / a + 1 / b):
            raise ParameterError(f"exponents violate 1/p = 1/r + 1/s for ({a}, {b})")
    mask = np.asarray(mask, dtype=bool)
    f, g = np.asarray(f, dtype=float), np.asarray(g, dtype=float)
    w = grid.cell_volume * mask
    Yfg = gradient_norm(field_family, grid, f * g)[0]
    Yf = gradient_norm(field_family, grid, f)[0]
    Yg = gradient_norm(field_family, grid, g)[0]
    lhs = _lp(Yfg, w, p)
    rhs = _lp(Yf, w, r) * _lp(g, w, s) + _lp(f, w, r_tilde) * _lp(Yg, w, s_tilde)
    return lhs, rhs, (lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf))


# representation formula ----------------------------------------------------------

@dataclass
class RepresentationReport:
    C: float
    points: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    violations: list = field(default_factory=list)


def representation_check(space: DiscreteSpace, grid: GridSpec, field_family: FieldFamily,
                         ball, fs) -> RepresentationReport:
    """Smallest C with |prod f_k(x) - prod (f_k)_B| <= C sum_k I_B(|f_1|, .., |Yf_k|, .., |f_m|)(x).

    I_B is the m-linear fractional integral of order 1 on B viewed as a space
    of its own: sum over y in B^m of prod g_i(y_i) rho(x, y) / mu(B(x, rho(x, y)))^m
    prod mu(y_i), tuples with rho(x, y) = 0 left out and ball masses taken in B.
    Points with rhs = 0 < lhs are listed as violations and make C infinite.
    """
    mask = _mask_of(space, ball)
    fs = [np.asarray(f, dtype=float) for f in fs]
    m = len(fs)
    idx = np.flatnonzero(mask)
    if len(idx) < 2:
        raise InputError("the ball needs at least two points")
    sub = subspace(space, mask)
    w = space.measure[idx]
    avgs = [float(np.sum(f[idx] * w) / w.sum()) for f in fs]
    prod = np.prod([f[idx] for f in fs], axis=0)
    lhs = np.abs(prod - np.prod(avgs))
    grads = [gradient_norm(field_family, grid, f)[0][idx] for f in fs]
    absf = [np.abs(f[idx]) for f in fs]
    K = Kernel.cc_alpha(1.0, m)
    rhs = np.zeros(len(idx))
    for a in range(len(idx)):
        T = K.tensor(sub, a)
        for k in range(m):
            gs = [grads[i] if i == k else absf[i] for i in range(m)]
            Tk = T
            for gi in reversed(gs):
                Tk = Tk @ (gi * sub.measure)
            rhs[a] += float(Tk)
    viol = [int(idx[a]) for a in np.flatnonzero((rhs == 0) & (lhs > 1e-14))]
    pos = rhs > 0
    C = float(np.max(lhs[pos] / rhs[pos])) if pos.any() else 0.0
    if viol:
        C = math.inf
    return RepresentationReport(C, idx, lhs, rhs, viol)


def representation_poincare_bound(space: DiscreteSpace, grid: GridSpec, field_family: FieldFamily,
                                  ball, f) -> tuple[float, float, float]:
    """For m = 1, u = v = 1, p = q = 2: the Poincaré ratio on B, the pointwise
    representation constant C_rep and the L2 norm of I_B.  The ratio never
    exceeds C_rep times the norm."""
    mask = _mask_of(space, ball)
    rep = representation_check(space, grid, field_family, mask, [f])
    sub = subspace(space, mask)
    norm = potential_operator_norm(sub, np.ones(sub.n, dtype=bool), alpha=1.0)
    f = np.asarray(f, dtype=float)
    w = space.measure * mask
    fb = float(np.sum(f * w) / w.sum())
    lhs = _lp(f - fb, w, 2.0)
    rhs = _lp(gradient_norm(field_family, grid, f)[0], w, 2.0)
    return (lhs / rhs if rhs > 0 else 0.0), rep.C, norm


# (H1) ------------------------------------------------------------------------------

@dataclass
class H1Report:
    lhs: float
    rhs_integral: float
    radius: float
    constant: float


def jerison_h1_check(space: DiscreteSpace, grid: GridSpec, field_family: FieldFamily,
                     ball: Ball, f, a1: float = 2.0) -> H1Report:
    """int_B |f - f_B| against r(B) int_{a1 B} |Yf|; constant = lhs / (r rhs)."""
    mask = space.ball_mask(ball)
    big = space.ball_mask(ball.scaled(a1))
    if np.any(big & grid.boundary_mask()):
        raise InputError("the enlarged ball reaches the edge of the grid")
    if not mask.any():
        raise InputError("empty ball")
    f = np.asarray(f, dtype=float)
    w = space.measure
    fb = float(np.sum((f * w)[mask]) / w[mask].sum())
    lhs = float(np.sum((np.abs(f - fb) * w)[mask]))
    rhs = float(np.sum((gradient_norm(field_family, grid, f)[0] * w)[big]))
    if rhs == 0:
        const = 0.0 if lhs == 0 else math.inf
    else:
        const = lhs / (ball.radius * rhs)
    return H1Report(lhs, rhs, ball.radius, const)


# the Poincaré harness ------------------------------------------------------------------

@dataclass
class PoincareReport:
    ball: Ball | None
    exponents: dict
    lhs: list
    rhs: list
    ratios: list
    seed: int
    space_digest: str
    weights_digest: str
    condition: float | None = None
    refinement: list = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return float(max(self.ratios)) if self.ratios else 0.0

    @property
    def quantiles(self) -> dict:
        if not self.ratios:
            return {}
        return {str(p): float(np.quantile(self.ratios, p)) for p in (0.0, 0.5, 0.9, 1.0)}

    def to_dict(self) -> dict:
        return {
            "theorem": "multilinear_poincare",
            "space_digest": self.space_digest,
            "exponents": self.exponents,
            "weights_digest": self.weights_digest,
            "ball": None if self.ball is None else {"center": self.ball.center,
                                                    "radius": self.ball.radius},
            "condition_sup": self.condition,
            "trials": len(self.ratios),
            "max_ratio": self.max_ratio,
            "ratio_quantiles": self.quantiles,
            "refinement": self.refinement,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["trial", "lhs", "rhs", "ratio"])
        for i, (a, b, c) in enumerate(zip(self.lhs, self.rhs, self.ratios)):
            wr.writerow([i, repr(a), repr(b), repr(c)])
        return buf.getvalue()


def poincare_sides(grid: GridSpec, field_family: FieldFamily, mask: np.ndarray,
                   ws: WeightSystem, fs, measure: np.ndarray | None = None) -> tuple[float, float]:
    """Both sides of the weighted multilinear Poincaré inequality on B.

    lhs = (int_B (|prod f_k - prod (f_k)_B| u)^q)^{1/q}
    rhs = sum_k (int_B (|Yf_k| v_k)^{p_k})^{1/p_k} prod_{i != k} (int_B (|f_i| v_i)^{p_i})^{1/p_i}
    """
    fs = [np.asarray(f, dtype=float) for f in fs]
    if len(fs) != ws.m:
        raise InputError(f"expected {ws.m} functions")
    w = (np.full(grid.size, grid.cell_volume) if measure is None else measure) * mask
    mass = w.sum()
    prod = np.prod(fs, axis=0)
    centre = np.prod([np.sum(f * w) / mass for f in fs])
    lhs = _lp((prod - centre) * ws.u, w, ws.q)
    plain = [_lp(f * v, w, pk) for f, v, pk in zip(fs, ws.v, ws.p_i)]
    grads = [_lp(gradient_norm(field_family, grid, f)[0] * v, w, pk)
             for f, v, pk in zip(fs, ws.v, ws.p_i)]
    rhs = 0.0
    for k in range(ws.m):
        term = grads[k]
        for i in range(ws.m):
            if i != k:
                term *= plain[i]
        rhs += term
    return lhs, rhs


def verify_theorem(space: DiscreteSpace, grid: GridSpec, field_family: FieldFamily,
                   ws: WeightSystem, ball: Ball, family: TestFunctionFamily, trials: int = 200,
                   seed: int = 0, condition: ConditionResult | None = None,
                   r0: float | None = None, margin: float = 0.1,
                   pinned: Sequence[Sequence[Func]] = ()) -> PoincareReport:
    """Run the weighted multilinear Poincaré inequality on ``trials`` random
    members of ``family`` (after any ``pinned`` trials, which come first).

    ``condition`` is the result of the matching weight check; without it, or
    when its sup is infinite, or when B is outside the admissible region, a
    warning is issued and the run proceeds.
    """
    if condition is None:
        warnings.warn("weight condition not pre-checked", stacklevel=2)
    elif not math.isfinite(condition.value):
        warnings.warn("weight condition fails (infinite sup)", stacklevel=2)
    r0 = default_r0(grid, margin) if r0 is None else r0
    if ball.radius > r0 or not omega0_mask(grid, margin)[ball.center]:
        warnings.warn(f"ball {ball} is outside the admissible region (r0 = {r0})", stacklevel=2)
    mask = space.ball_mask(ball)
    rng = np.random.default_rng(seed)
    lhs_l, rhs_l, ratio_l = [], [], []
    batches = [[grid.evaluate(f) for f in funcs] for funcs in pinned]
    for fs in batches + [family.sample(rng, grid) for _ in range(trials)]:
        lhs, rhs = poincare_sides(grid, field_family, mask, ws, fs, space.measure)
        lhs_l.append(lhs)
        rhs_l.append(rhs)
        ratio_l.append(lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf))
    ex = {"p": ws.p, "q": ws.q, "p_i": list(ws.p_i), "t": ws.t, "m": ws.m}
    return PoincareReport(ball, ex, lhs_l, rhs_l, ratio_l, seed, space.digest(),
                          _digest(ws.u, *ws.v),
                          None if condition is None else condition.value)


def refinement_entries(grids: Sequence[GridSpec], reports: Sequence[PoincareReport]) -> list[dict]:
    return [{"h": float(np.max(g.spacing)), "max_ratio": r.max_ratio} for g, r in zip(grids, reports)]


# p < 1 failure and the bilinear alternative -------------------------------------------

def geometric_schedule(lo_exp: int, hi_exp: int, base: float = 2.0) -> list[float]:
    """base^-lo_exp, ..., base^-hi_exp."""
    step = 1 if hi_exp >= lo_exp else -1
    return [base ** -k for k in range(lo_exp, hi_exp + step, step)]


def _interval_grid(cells: int) -> GridSpec:
    return GridSpec((-1.0,), (1.0,), (cells,), cell_centered=True)


def _cell_derivative(func: Func, grid: GridSpec) -> np.ndarray:
    """(u(x + h/2) - u(x - h/2)) / h on a 1D cell-centred grid (exact for
    piecewise-linear u with kinks on cell faces)."""
    x = grid.points()
    h = grid.spacing[0]
    return (func(x + h / 2) - func(x - h / 2)) / h


def _check_resolution(grid: GridSpec, eps_list) -> None:
    if min(eps_list) < 4 * grid.spacing[0]:
        raise InputError(f"eps = {min(eps_list)} is below the grid resolution")


def _inf_over_constants(values: np.ndarray, w: np.ndarray, q: float) -> float:
    """inf over a of (int |values - a|^q)^{1/q}."""
    lo, hi = float(values.min()), float(values.max())
    obj = lambda a: float(np.sum(np.abs(values - a) ** q * w))
    if hi == lo:
        return 0.0
    if q >= 1:
        res = minimize_scalar(obj, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12 * max(1.0, hi - lo)})
        best = min(res.fun, obj(lo), obj(hi))
    else:
        best = min(obj(a) for a in np.linspace(lo, hi, 201))
    return best ** (1.0 / q)


@dataclass
class FailureReport:
    p: float
    q: float
    eps: list
    lhs: list
    rhs: list
    ratio: list
    slope: float
    expected_slope: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["eps", "lhs", "rhs", "ratio"])
        for row in zip(self.eps, self.lhs, self.rhs, self.ratio):
            wr.writerow([repr(float(v)) for v in row])
        wr.writerow(["slope", repr(self.slope), "expected", repr(self.expected_slope)])
        return buf.getvalue()


def linear_failure_demo(p: float, eps: Sequence[float] | None = None, q: float | None = None,
                        cells: int = 2 ** 15) -> FailureReport:
    """Ramp family on (-1, 1): inf_a (int |u - a|^q)^{1/q} against (int |u'|^p)^{1/p}.

    With q = p/(1 - p) the ratio grows like eps^{-(1-p)/p} for p < 1; the
    fitted log-log slope is reported next to that value.  p = 1 is accepted
    as the bounded control case.
    """
    if not 0 < p <= 1:
        raise ParameterError("the failure demonstration needs 0 < p <= 1")
    eps = list(geometric_schedule(3, 8) if eps is None else eps)
    if q is None:
        q = p / (1 - p) if p < 1 else 1.0
    grid = _interval_grid(cells)
    _check_resolution(grid, eps)
    w = np.full(grid.size, grid.cell_volume)
    lhs, rhs = [], []
    for e in eps:
        u = ramp(e)
        lhs.append(_inf_over_constants(grid.evaluate(u), w, q))
        rhs.append(_lp(_cell_derivative(u, grid), w, p))
    ratio = np.array(lhs) / np.array(rhs)
    slope = float(np.polyfit(np.log(eps), np.log(ratio), 1)[0])
    return FailureReport(p, q, list(eps), lhs, rhs, ratio.tolist(), slope, -(1 - p) / p)


def bilinear_alternative_check(grid: GridSpec, f: Func, g: Func, p: float, r: float, s: float,
                               q: float, r_tilde: float | None = None, s_tilde: float | None = None,
                               mask=None) -> tuple[float, float, float]:
    """(int_B |fg - f_B g_B|^q)^{1/q} against ||f||_r ||g'||_s + ||f'||_r~ ||g||_s~ on a 1D grid."""
    r_tilde = r if r_tilde is None else r_tilde
    s_tilde = s if s_tilde is None else s_tilde
    for a, b in ((r, s), (r_tilde, s_tilde)):
        if not _close(1 / p, 1 / a + 1 / b):
            raise ParameterError(f"exponents violate 1/p = 1/r + 1/s for ({a}, {b})")
    if grid.ndim != 1:
        raise InputError("the bilinear check runs on 1D grids")
    mask = np.ones(grid.size, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    w = grid.cell_volume * mask
    fv, gv = grid.evaluate(f), grid.evaluate(g)
    df, dg = _cell_derivative(f, grid), _cell_derivative(g, grid)
    mass = w.sum()
    centre = (np.sum(fv * w) / mass) * (np.sum(gv * w) / mass)
    lhs = _lp(fv * gv - centre, w, q)
    rhs = _lp(fv, w, r) * _lp(dg, w, s) + _lp(df, w, r_tilde) * _lp(gv, w, s_tilde)
    return lhs, rhs, (lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf))


@dataclass
class BilinearScan:
    eps: list
    ratios: list

    @property
    def spread(self) -> float:
        return max(self.ratios) / min(self.ratios)


def bilinear_ramp_scan(p_i: tuple = (4 / 3, 4 / 3), q: float | None = None,
                       eps: Sequence[float] | None = None, cells: int = 2 ** 15) -> BilinearScan:
    """The bilinear inequality with f = g = ramp(eps) across an eps schedule."""
    p = 1.0 / sum(1.0 / x for x in p_i)
    q = p / (1 - p) if q is None else q
    eps = list(geometric_schedule(3, 8) if eps is None else eps)
    grid = _interval_grid(cells)
    _check_resolution(grid, eps)
    ratios = []
    for e in eps:
        u = ramp(e)
        ratios.append(bilinear_alternative_check(grid, u, u, p, p_i[0], p_i[1], q)[2])
    return BilinearScan(eps, ratios)
