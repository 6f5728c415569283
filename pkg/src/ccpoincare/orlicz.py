"""Young functions, Luxemburg ball averages, Orlicz maximal functions and
the integral growth test for Orlicz maximal operators."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import InputError, ParameterError
from .space import BallFamily, DiscreteSpace, sup_over_balls_containing

REL_TOL = 1e-10


def _log_factor(t, delta):
    """log(1+t) for delta >= 0, log(e+t) for delta < 0 (keeps psi ~ t^r at 0)."""
    return np.log1p(t) if delta >= 0 else np.log(np.e + t)


@dataclass(frozen=True, eq=False)
class YoungFunction:
    """A Young function psi, normalized so that psi(1) = 1 unless ``normalize`` is off.

    Kinds: ``power`` (t^r), ``power_log`` (t^r L(t)^delta with L = log(1+t)
    for delta >= 0 and log(e+t) for delta < 0), ``custom`` (tabulated, monotone
    cubic interpolation, power-law extrapolation) and ``complement`` (numeric
    Legendre transform of another Young function).
    """

    kind: str
    r: float = 1.0
    delta: float = 0.0
    table: tuple | None = None
    base: "YoungFunction | None" = None
    normalize: bool = True
    complementary: "YoungFunction | None" = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("power", "power_log", "custom", "complement"):
            raise ParameterError(f"unknown Young function kind {self.kind!r}")
        if self.kind in ("power", "power_log") and self.r < 1:
            raise ParameterError("Young functions need r >= 1")
        if self.kind == "power_log" and self.r == 1 and self.delta < 0:
            raise ParameterError("t log^delta with delta < 0 is not convex")
        if self.kind == "custom":
            t, psi = (np.asarray(a, dtype=float) for a in self.table)
            if len(t) < 3 or np.any(np.diff(t) <= 0) or np.any(np.diff(psi) < 0):
                raise InputError("tabulated psi needs >= 3 increasing t and nondecreasing psi")
            if t[0] != 0 or psi[0] != 0:
                raise InputError("tabulated psi must start at (0, 0)")
            object.__setattr__(self, "_interp", PchipInterpolator(t, psi, extrapolate=False))
            slope = math.log(psi[-1] / psi[-2]) / math.log(t[-1] / t[-2])
            object.__setattr__(self, "_tail", (t[-1], psi[-1], max(slope, 1.0)))
        if self.kind == "complement" and self.base is None:
            raise ParameterError("a complement needs a base function")
        scale = 1.0
        if self.normalize:
            scale = self._solve_unit()
        object.__setattr__(self, "scale", scale)

    # constructors -------------------------------------------------------------

    @classmethod
    def power(cls, r: float) -> "YoungFunction":
        return cls("power", r=r, label=f"power:{r:g}")

    @classmethod
    def power_log(cls, r: float, delta: float) -> "YoungFunction":
        return cls("power_log", r=r, delta=delta, label=f"powerlog:{r:g}:{delta:g}")

    @classmethod
    def tabulated(cls, t, psi) -> "YoungFunction":
        return cls("custom", table=(tuple(map(float, t)), tuple(map(float, psi))), label="custom")

    def complement(self, normalize: bool = False) -> "YoungFunction":
        """Numeric complementary function psi_bar(t) = sup_s (s t - psi(s))."""
        return YoungFunction("complement", base=self, normalize=normalize,
                             label=f"complement({self.label})")

    def paired(self, other: "YoungFunction") -> "YoungFunction":
        return YoungFunction(self.kind, self.r, self.delta, self.table, self.base,
                             self.normalize, other, self.label)

    # evaluation ------------------------------------------------------------------

    def _raw(self, t: np.ndarray) -> np.ndarray:
        if self.kind == "power":
            return t ** self.r
        if self.kind == "power_log":
            return t ** self.r * _log_factor(t, self.delta) ** self.delta
        if self.kind == "custom":
            t_end, p_end, k = self._tail
            inside = t <= t_end
            out = np.empty_like(t)
            out[inside] = self._interp(t[inside])
            out[~inside] = p_end * (t[~inside] / t_end) ** k
            return out
        return self._legendre(t)

    def _raw_log(self, t: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            if self.kind == "power":
                return self.r * np.log(t)
            if self.kind == "power_log":
                return self.r * np.log(t) + self.delta * np.log(_log_factor(t, self.delta))
            if self.kind == "custom":
                t_end, p_end, k = self._tail
                inside = t <= t_end
                out = np.empty_like(t)
                out[inside] = np.log(self._interp(t[inside]))
                out[~inside] = math.log(p_end) + k * np.log(t[~inside] / t_end)
                return out
            return np.log(self._legendre(t))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).ravel()
        out = np.zeros_like(flat)
        pos = flat > 0
        out[pos] = self._raw(flat[pos] * self.scale)
        return out.reshape(t.shape) if t.ndim else float(out[0])

    def log_psi(self, t):
        """log psi(t), finite for t far beyond the float range of psi itself."""
        t = np.asarray(t, dtype=float)
        return self._raw_log(t * self.scale)

    def log_psi_of_log(self, s):
        """log psi(e^s) for large s, without forming e^s where possible."""
        s = np.asarray(s, dtype=float)
        if self.kind in ("power", "power_log"):
            ls = s + math.log(self.scale)
            out = self.r * ls
            if self.kind == "power_log":
                # log(1+e^ls) and log(e+e^ls) both approach ls for large ls
                lf = (np.logaddexp(0.0, ls) if self.delta >= 0
                      else np.logaddexp(1.0, ls))
                out = out + self.delta * np.log(lf)
            return out
        return self.log_psi(np.exp(s))

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        x = t * self.scale
        if self.kind == "power":
            d = self.r * x ** (self.r - 1)
        elif self.kind == "power_log":
            L = _log_factor(x, self.delta)
            dL = 1.0 / (1.0 + x) if self.delta >= 0 else 1.0 / (np.e + x)
            with np.errstate(divide="ignore", invalid="ignore"):
                d = (self.r * x ** (self.r - 1) * L ** self.delta
                     + self.delta * x ** self.r * L ** (self.delta - 1) * dL)
            d = np.where(x > 0, d, 0.0)
        else:
            h = 1e-6 * np.maximum(x, 1e-6)
            d = (self._raw(x + h) - self._raw(np.maximum(x - h, 0))) / (x + h - np.maximum(x - h, 0))
        return d * self.scale

    def _legendre(self, t: np.ndarray) -> np.ndarray:
        base = self.base
        out = np.empty_like(t)
        for i, ti in enumerate(t):
            if ti <= 0:
                out[i] = 0.0
                continue
            g = lambda s: base.derivative(np.array([s]))[0] - ti
            hi = 1.0
            while g(hi) < 0:
                hi *= 2.0
                if hi > 1e300:
                    raise ParameterError("complement sup not attained")
            s = brentq(g, 0.0, hi, xtol=1e-14, rtol=1e-15) if g(0.0) < 0 else 0.0
            out[i] = s * ti - float(base(s))
        return out

    def _solve_unit(self) -> float:
        """s with psi_raw(s) = 1."""
        f = lambda s: float(self._raw(np.array([s]))[0]) - 1.0
        lo, hi = 1.0, 1.0
        while f(lo) > 0:
            lo /= 2.0
        while f(hi) < 0:
            hi *= 2.0
        if f(lo) == 0:
            return lo
        return brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)

    def inverse(self, y):
        """psi^{-1}(y) by monotone bisection with geometric bracket growth."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        lo = np.zeros_like(y)
        hi = np.ones_like(y)
        while np.any(self(hi) < y):
            grow = self(hi) < y
            lo = np.where(grow, hi, lo)
            hi = np.where(grow, hi * 2.0, hi)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = self(mid) < y
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= REL_TOL * np.maximum(hi, 1e-300)):
                break
        return hi

    # structural diagnostics ---------------------------------------------------------

    def is_young(self, t_max: float = 1e3, samples: int = 400) -> bool:
        t = np.concatenate([[0.0], np.geomspace(1e-4, t_max, samples)])
        v = self(t)
        if v[0] != 0 or np.any(np.diff(v) < -1e-12 * np.abs(v[1:])):
            return False
        slope = np.diff(v) / np.diff(t)
        return bool(np.all(np.diff(slope) >= -1e-7 * np.maximum(1.0, np.abs(slope[1:]))))

    def doubling(self, N: float = 1.0, t_max: float = 1e6, samples: int = 400) -> tuple[float, float]:
        """Measured (C, N) with psi(2t) <= C psi(t) for sampled t >= N."""
        t = np.geomspace(N, t_max, samples)
        return float(np.max(self(2 * t) / self(t))), N


def parse_young(spec: str) -> YoungFunction:
    """"power:r", "powerlog:r:delta", or a path to a tabulated JSON {t, psi}."""
    parts = spec.split(":")
    try:
        if parts[0] == "power" and len(parts) == 2:
            return YoungFunction.power(float(parts[1]))
        if parts[0] == "powerlog" and len(parts) == 3:
            return YoungFunction.power_log(float(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise InputError(f"bad Young function spec {spec!r}") from exc
    path = Path(spec)
    if path.suffix == ".json" and path.exists():
        data = json.loads(path.read_text())
        return YoungFunction.tabulated(data["t"], data["psi"])
    raise InputError(f"bad Young function spec {spec!r}")


def llogl(p: float, eps: float) -> YoungFunction:
    """t^p log(1+t)^(p-1+eps)."""
    return YoungFunction.power_log(p, p - 1 + eps)


def conjugate(p: float) -> float:
    return math.inf if p == 1 else p / (p - 1)


# Luxemburg averages ------------------------------------------------------------

def _luxemburg(vals: np.ndarray, weights: np.ndarray, psi: YoungFunction) -> np.ndarray:
    """Luxemburg averages for a batch: vals (N,), weights (B, N) rows summing to 1."""
    a = np.abs(vals)
    mean = weights @ a
    support = weights > 0
    top = np.where(support, a[None, :], 0.0).max(axis=1)
    out = np.zeros(len(weights))
    live = top > 0
    if not live.any():
        return out
    W = weights[live]
    lo = mean[live].copy()
    hi = top[live].copy()
    # psi(1) = 1 and convexity bracket the answer between the mean and the max
    for _ in range(200):
        mid = np.sqrt(lo * hi) if np.all(lo > 0) else 0.5 * (lo + hi)
        avg = np.einsum("bn,bn->b", W, psi(a[None, :] / mid[:, None]))
        ok = avg <= 1.0
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
        if np.all(hi - lo <= REL_TOL * hi):
            break
    out[live] = hi
    return out


def orlicz_ball_norm(space: DiscreteSpace, ball_or_mask, f, psi: YoungFunction) -> float:
    """||f||_{psi,B} = inf{lambda > 0 : avg_B psi(|f| / lambda) <= 1}."""
    mask = (space.ball_mask(ball_or_mask) if not isinstance(ball_or_mask, np.ndarray)
            else ball_or_mask.astype(bool))
    mass = space.measure[mask].sum()
    if mass <= 0:
        raise InputError("Luxemburg average over an empty (or null) set")
    w = np.where(mask, space.measure, 0.0) / mass
    return float(_luxemburg(np.asarray(f, dtype=float), w[None, :], psi)[0])


def family_luxemburg(family: BallFamily, f, psi: YoungFunction) -> np.ndarray:
    """Luxemburg average over every ball of the family."""
    sp = family.space
    f = np.asarray(f, dtype=float)
    out = np.empty(len(family))
    cols = np.arange(sp.n)
    for c, sl in family._slices.items():
        order = sp.order[c]
        sizes = family.sizes[sl]
        W = np.where(cols[None, :] < sizes[:, None], sp.measure[order][None, :], 0.0)
        W /= W.sum(axis=1, keepdims=True)
        out[sl] = _luxemburg(f[order], W, psi)
    return out


def orlicz_maximal(space: DiscreteSpace, f, psi: YoungFunction,
                   family: BallFamily | None = None) -> np.ndarray:
    """M_psi f(x) = sup over balls B containing x of ||f||_{psi,B}, at every x."""
    fam = family if family is not None else space.ball_family()
    return sup_over_balls_containing(fam, family_luxemburg(fam, f, psi))[0]


# integral growth test ------------------------------------------------------------

@dataclass
class BpReport:
    verdict: str                  # "finite" | "divergent" | "inconclusive"
    log_increments: list[float]
    ratios: list[float]
    partial_log_integral: float
    form: str


def bp_condition_check(psi: YoungFunction, p: float, c: float = 1.0, form: str = "direct",
                       blocks: int = 14, window: int = 5, threshold: float = 0.9) -> BpReport:
    """Decide whether an integral of the growth-test type converges.

    ``direct``:  int_c^inf psi(t) t^(-p) dt/t.
    ``dual``:    int_c^inf (t^(p') / psi(t))^(p-1) dt/t, which is the form of
                 the conditions on the complementary side (pass the function
                 whose complement is tested, or Psi with p = q').
    Increments are integrated over blocks log(t/c) in [2^(j-1), 2^j] in log
    space.  The verdict is "finite" if the last ``window`` increment ratios
    are all below ``threshold``, "divergent" if all are at or above it, and
    "inconclusive" otherwise.
    """
    if p <= 1:
        raise ParameterError("the growth test needs p > 1")
    if c <= 0:
        raise ParameterError("the lower limit c must be positive")
    if form not in ("direct", "dual"):
        raise ParameterError(f"unknown form {form!r}")
    lc = math.log(c)
    pp = conjugate(p)

    def g(s):   # log of the integrand in the variable s = log(t / c), dt/t = ds
        ls = np.asarray(s) + lc
        lpsi = psi.log_psi_of_log(ls)
        if form == "direct":
            return lpsi - p * ls
        return (p - 1) * (pp * ls - lpsi)

    edges = [0.0] + [2.0 ** j for j in range(blocks + 1)]
    logs = []
    for a, b in zip(edges[:-1], edges[1:]):
        grid = np.linspace(a, b, 65)
        shift = float(np.max(g(grid)))
        val, _ = quad(lambda s: math.exp(float(g(s)) - shift), a, b, limit=200,
                      epsabs=0.0, epsrel=1e-10)
        logs.append(math.log(val) + shift if val > 0 else -math.inf)
    ratios = [math.exp(min(b - a, 700.0)) if math.isfinite(a) else math.nan
              for a, b in zip(logs[:-1], logs[1:])]
    tail = ratios[-window:]
    if all(r < threshold for r in tail):
        verdict = "finite"
    elif all(r >= threshold for r in tail):
        verdict = "divergent"
    else:
        verdict = "inconclusive"
    total = float(np.logaddexp.reduce(np.array(logs)))
    return BpReport(verdict, logs, ratios, total, form)


def generalized_holder_check(space: DiscreteSpace, ball_or_mask, f, g,
                             psi: YoungFunction) -> tuple[float, float, float]:
    """avg_E |f g| against ||f||_{psi,E} ||g||_{psi_bar,E}; returns (lhs, rhs, ratio)."""
    if psi.complementary is None:
        raise ParameterError("the Hölder check needs a complementary function")
    mask = (space.ball_mask(ball_or_mask) if not isinstance(ball_or_mask, np.ndarray)
            else ball_or_mask.astype(bool))
    mass = space.measure[mask].sum()
    f, g = np.asarray(f, dtype=float), np.asarray(g, dtype=float)
    lhs = float(np.sum(np.abs(f * g)[mask] * space.measure[mask]) / mass)
    rhs = orlicz_ball_norm(space, mask, f, psi) * orlicz_ball_norm(space, mask, g, psi.complementary)
    if rhs == 0:
        return lhs, rhs, 0.0 if lhs == 0 else math.inf
    return lhs, rhs, lhs / rhs


def inverse_product_bounds(psi: YoungFunction, psi_bar: YoungFunction,
                           t=None) -> tuple[float, float]:
    """min and max of psi^{-1}(t) psi_bar^{-1}(t) / t over sampled t."""
    if t is None:
        t = np.geomspace(1e-3, 1e6, 60)
    prod = psi.inverse(t) * psi_bar.inverse(t) / t
    return float(prod.min()), float(prod.max())

