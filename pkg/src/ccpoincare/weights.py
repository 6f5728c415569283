"""Weight systems and the sup-over-balls conditions on them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ParameterError
from .operators.kernels import PhiFunctional, phi_of_ball
from .operators.maximal import gamma_maximal, iterated_maximal
from .operators.potential import potential_all
from .orlicz import YoungFunction, bp_condition_check, conjugate, family_luxemburg
from .space import Ball, BallFamily, DiscreteSpace

POWER_VARIANTS = ("theorem1_q>1", "theorem1_q<=1", "cc_q>1", "cc_q<=1",
                  "general_q>1", "general_q<=1")


def _canonical_variant(variant: str) -> str:
    v = variant.replace("≤", "<=")
    if v not in POWER_VARIANTS:
        raise ParameterError(f"unknown variant {variant!r}; expected one of {POWER_VARIANTS}")
    return v


@dataclass(frozen=True, eq=False)
class WeightSystem:
    """Weights u, v_1..v_m with exponents 1/p = sum 1/p_i, 1/m < p <= q.

    ``t`` is the auxiliary exponent of the power conditions; ``psi`` and
    ``phis`` are the Young functions of the Orlicz conditions.
    """

    u: np.ndarray
    v: tuple
    p: float
    q: float
    p_i: tuple
    t: float | None = None
    psi: YoungFunction | None = None
    phis: tuple | None = None

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).ravel()
        v = tuple(np.asarray(vi, dtype=float).ravel() for vi in self.v)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "p_i", tuple(float(x) for x in self.p_i))
        m = len(self.p_i)
        if m == 0 or len(v) != m:
            raise InputError("need one weight v_i per exponent p_i")
        if any(vi.shape != u.shape for vi in v):
            raise InputError("all weights must live on the same points")
        if np.any(u < 0) or any(np.any(vi < 0) for vi in v):
            raise InputError("weights must be nonnegative")
        if not all(1 < pi < math.inf for pi in self.p_i):
            raise ParameterError("each p_i must lie in (1, inf)")
        if abs(1 / self.p - sum(1 / pi for pi in self.p_i)) > 1e-12:
            raise ParameterError("exponents violate 1/p = sum 1/p_i")
        if not (1 / m < self.p <= self.q < math.inf):
            raise ParameterError("exponents violate 1/m < p <= q < inf")
        if self.t is not None and not self.t > 1:
            raise ParameterError("the auxiliary exponent t must exceed 1")
        if self.phis is not None and len(self.phis) != m:
            raise InputError("need one Young function Phi_i per weight v_i")

    @classmethod
    def from_exponents(cls, u, v, p_i, q, **kw) -> "WeightSystem":
        p = 1.0 / sum(1.0 / x for x in p_i)
        return cls(u, tuple(v), p, q, tuple(p_i), **kw)

    @property
    def m(self) -> int:
        return len(self.p_i)

    @property
    def p_conj(self) -> tuple:
        return tuple(conjugate(x) for x in self.p_i)

    def measure_exponent(self) -> float:
        """1/q + sum 1/p_i', which equals 1/q - 1/p + m."""
        return 1 / self.q + sum(1 / x for x in self.p_conj)

    def scaled(self, lam_u: float = 1.0, lam_v=None) -> "WeightSystem":
        lam_v = lam_v if lam_v is not None else [1.0] * self.m
        return WeightSystem(self.u * lam_u, tuple(vi * l for vi, l in zip(self.v, lam_v)),
                            self.p, self.q, self.p_i, self.t, self.psi, self.phis)


@dataclass
class ConditionResult:
    value: float
    ball: Ball | None
    index: int | None
    values: np.ndarray
    variant: str


def _family(space: DiscreteSpace, family: BallFamily | None, center_mask) -> BallFamily:
    if family is not None:
        return family
    centers = None if center_mask is None else np.flatnonzero(np.asarray(center_mask, dtype=bool))
    if centers is not None and len(centers) == 0:
        raise InputError("the center mask selects no points")
    return space.ball_family(centers)


def _power_mean(family: BallFamily, w: np.ndarray, s: float) -> np.ndarray:
    """(avg_B w^s)^(1/s) for every ball; s < 0 allowed (zero weight -> inf)."""
    with np.errstate(divide="ignore", over="ignore"):
        ws = np.where(w > 0, w, 0.0) ** s if s > 0 else np.where(w > 0, w ** s, np.inf)
    avg = family.averages(ws) if np.all(np.isfinite(ws)) else _avg_with_inf(family, ws)
    with np.errstate(divide="ignore"):
        return avg ** (1.0 / abs(s))


def _avg_with_inf(family: BallFamily, ws: np.ndarray) -> np.ndarray:
    bad = ~np.isfinite(ws)
    avg = family.averages(np.where(bad, 0.0, ws))
    hits = family.integrals(bad * 1.0) > 0
    return np.where(hits, np.inf, avg)


def _witness(family: BallFamily, vals: np.ndarray, variant: str) -> ConditionResult:
    vals = np.where(np.isnan(vals), np.inf, vals)
    top = vals.max()
    cand = np.flatnonzero(vals == top)
    # ties: smallest center index, then smallest radius
    best = min(cand, key=lambda b: (family.centers[b], family.radii[b]))
    return ConditionResult(float(top), family.ball(int(best)), int(best), vals, variant)


def family_phi(phi: PhiFunctional, family: BallFamily) -> np.ndarray:
    return np.array([phi_of_ball(phi, family.space, family.ball(b), strict=False)
                     for b in range(len(family))])


def _v_factor(family: BallFamily, ws: WeightSystem, t: float) -> np.ndarray:
    out = np.ones(len(family))
    for vi, pc in zip(ws.v, ws.p_conj):
        out = out * _power_mean(family, vi, -t * pc)
    return out


def check_power_condition(space: DiscreteSpace, ws: WeightSystem, variant: str,
                          phi: PhiFunctional | None = None, alpha: float = 1.0,
                          family: BallFamily | None = None, center_mask=None) -> ConditionResult:
    """Sup over balls of a two-weight power condition.

    Every variant multiplies a geometric factor by (avg_B u^{qt})^{1/qt}
    (q > 1) or (avg_B u^q)^{1/q} (q <= 1) and prod_i (avg_B v_i^{-t p_i'})^{1/(t p_i')}:

    * ``theorem1``: diam(B) mu(B)^{1/q - 1/p}
    * ``cc``:       diam(B)^alpha mu(B)^{1/q - 1/p}
    * ``general``:  phi(B) mu(B)^{1/q + sum 1/p_i'}
    """
    variant = _canonical_variant(variant)
    big_q = variant.endswith("q>1")
    if big_q != (ws.q > 1):
        raise ParameterError(f"variant {variant} does not match q = {ws.q}")
    if ws.t is None:
        raise ParameterError("power conditions need the auxiliary exponent t")
    fam = _family(space, family, center_mask)
    mu = fam.masses
    if variant.startswith("theorem1"):
        geo = fam.diameters * mu ** (1 / ws.q - 1 / ws.p)
    elif variant.startswith("cc"):
        geo = fam.diameters ** alpha * mu ** (1 / ws.q - 1 / ws.p)
    else:
        if phi is None:
            raise ParameterError("general variants need a phi functional")
        geo = family_phi(phi, fam) * mu ** ws.measure_exponent()
    u_fac = _power_mean(fam, ws.u, ws.q * ws.t if big_q else ws.q)
    with np.errstate(invalid="ignore"):
        vals = geo * u_fac * _v_factor(fam, ws, ws.t)
    return _witness(fam, vals, variant)


def orlicz_prerequisites(ws: WeightSystem) -> dict:
    """Growth tests on Psi (q > 1) and on every Phi_i; verdicts keyed by condition."""
    out = {}
    if ws.q > 1:
        out["Psi"] = bp_condition_check(ws.psi, conjugate(ws.q), form="dual").verdict
    for i, (phi_i, pi) in enumerate(zip(ws.phis, ws.p_i)):
        out[f"Phi_{i + 1}"] = bp_condition_check(phi_i, pi, form="dual").verdict
    return out


def check_orlicz_condition(space: DiscreteSpace, phi: PhiFunctional, ws: WeightSystem,
                           family: BallFamily | None = None, center_mask=None,
                           check_growth: bool = True) -> ConditionResult:
    """Sup over balls of phi(B) mu(B)^{1/q + sum 1/p_i'} ||u||_{Psi,B} prod ||v_i^{-1}||_{Phi_i,B}.

    For q <= 1 the u factor is (avg_B u^q)^{1/q}.  The growth tests
    int (t^q / Psi)^{q'-1} dt/t < inf and int (t^{p_i'} / Phi_i)^{p_i - 1} dt/t < inf
    are run first unless ``check_growth`` is off.
    """
    if ws.phis is None or (ws.q > 1 and ws.psi is None):
        raise ParameterError("Orlicz conditions need Psi and Phi_1..Phi_m")
    if check_growth:
        for name, verdict in orlicz_prerequisites(ws).items():
            if verdict != "finite":
                which = ("growth test on Psi against q'" if name == "Psi"
                         else f"growth test on {name} against p_{name[4:]}")
                raise ParameterError(f"{which} failed: {verdict}")
    fam = _family(space, family, center_mask)
    geo = family_phi(phi, fam) * fam.masses ** ws.measure_exponent()
    if ws.q > 1:
        u_fac = family_luxemburg(fam, ws.u, ws.psi)
    else:
        u_fac = _power_mean(fam, ws.u, ws.q)
    v_fac = np.ones(len(fam))
    for vi, phi_i in zip(ws.v, ws.phis):
        if np.any(vi <= 0):
            inv = np.where(vi > 0, 1.0 / np.where(vi > 0, vi, 1.0), np.inf)
            hit = fam.integrals((~np.isfinite(inv)) * 1.0) > 0
            lux = family_luxemburg(fam, np.where(np.isfinite(inv), inv, 0.0), phi_i)
            v_fac = v_fac * np.where(hit, np.inf, lux)
        else:
            v_fac = v_fac * family_luxemburg(fam, 1.0 / vi, phi_i)
    with np.errstate(invalid="ignore"):
        vals = geo * u_fac * v_fac
    return _witness(fam, vals, "orlicz_q>1" if ws.q > 1 else "orlicz_q<=1")


def a_pq_constant(space: DiscreteSpace, w, p: float, q: float,
                  family: BallFamily | None = None) -> float:
    """sup over balls of (avg_B w^q)^{1/q} (avg_B w^{-p'})^{1/p'}.

    Balls replace the Euclidean cubes; under doubling the classes agree up to
    constants.
    """
    if not (1 < p < math.inf and q > 0):
        raise ParameterError("A_{p,q} needs 1 < p < inf and q > 0")
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise InputError("A_{p,q} weights must be positive")
    fam = family if family is not None else space.ball_family()
    vals = _power_mean(fam, w, q) * _power_mean(fam, w, -conjugate(p))
    return float(vals.max())


def fracmax_weight_bound_check(space: DiscreteSpace, phi: PhiFunctional, w, p_i, alphas, fs,
                               family: BallFamily | None = None) -> tuple[float, float, float]:
    """Compare (int |T f|^p w)^{1/p} with prod_i (int |f_i|^{p_i} M_{phi_i}(W))^{1/p_i}.

    T is the potential operator of ``phi.kernel``, phi_i(B) = (phi(B)^{alpha_i}
    mu(B))^{p_i} / mu(B), and W is the floor(p)-fold Hardy-Littlewood iterate of
    w when p > 1 and w itself otherwise.
    """
    m = phi.kernel.m
    p_i = [float(x) for x in p_i]
    alphas = [float(a) for a in alphas]
    if len(p_i) != m or len(alphas) != m or len(fs) != m:
        raise InputError(f"expected {m} exponents, weights alpha_i and functions")
    if not all(0 < a < 1 for a in alphas) and m > 1:
        raise ParameterError("each alpha_i must lie in (0, 1)")
    if abs(sum(alphas) - 1) > 1e-12:
        raise ParameterError("the alpha_i must sum to 1")
    p = 1.0 / sum(1.0 / x for x in p_i)
    w = np.asarray(w, dtype=float)
    fs = [np.asarray(f, dtype=float) for f in fs]
    fam = family if family is not None else space.ball_family()
    Tf = potential_all(space, phi.kernel, fs)
    lhs = float(np.sum(np.abs(Tf) ** p * w * space.measure) ** (1 / p))
    W = iterated_maximal(space, w, int(math.floor(p)), fam) if p > 1 else w
    ph = family_phi(phi, fam)
    mu = fam.masses
    rhs = 1.0
    for f, pi, a in zip(fs, p_i, alphas):
        gamma = (ph ** a * mu) ** pi / mu
        Mw = gamma_maximal(space, W, gamma, fam)
        rhs *= float(np.sum(np.abs(f) ** pi * Mw * space.measure)) ** (1 / pi)
    if rhs == 0:
        return lhs, rhs, 0.0 if lhs == 0 else math.inf
    return lhs, rhs, lhs / rhs
