"""Multilinear kernels K(x, y) on finite spaces and the ball functional phi(B).

``rho(x, y) = rho(x, y_1) + ... + rho(x, y_m)`` throughout.  Tuples on which a
kernel is singular (``rho(x, y) = 0`` for the fractional kernels) are omitted
from sums; in the continuum they form a null set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import EmptyConstraintError, InputError, ParameterError
from ..space import Ball, BallFamily, DiscreteSpace, _nested_pairs

TERM_CAP = 10**8

KINDS = ("cc_alpha", "euclidean_alpha", "custom")


def check_terms(space: DiscreteSpace, m: int):
    terms = m * space.n ** m
    if terms > TERM_CAP:
        raise ParameterError(f"{terms:.3g} terms exceeds the cap of {TERM_CAP:.0e}; "
                             "use fewer points or a smaller m")


def tuple_sums(d: np.ndarray, m: int) -> np.ndarray:
    """Array s[i1..im] = d[i1] + ... + d[im] for a vector d."""
    s = d
    for _ in range(m - 1):
        s = np.add.outer(s, d)
    return s


@dataclass(frozen=True, eq=False)
class Kernel:
    """A nonnegative kernel K(x, y_1, ..., y_m).

    ``custom`` kernels take ``func(space, x, ys)`` with ``x`` an index and
    ``ys`` an integer array of shape (..., m); an optional ``extension(space,
    xs, ys)`` with (..., m) arrays gives the off-diagonal form used by the
    growth check.
    """

    kind: str
    m: int = 1
    alpha: float = 1.0
    n: int | None = None
    func: Callable | None = None
    extension: Callable | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown kernel kind {self.kind!r}")
        if self.m < 1:
            raise ParameterError("m must be a positive integer")
        if self.kind != "custom" and self.alpha <= 0:
            raise ParameterError("alpha must be positive")
        if self.kind == "custom" and self.func is None:
            raise ParameterError("custom kernels need a callback")

    @classmethod
    def cc_alpha(cls, alpha: float, m: int = 1) -> "Kernel":
        return cls("cc_alpha", m, alpha)

    @classmethod
    def euclidean_alpha(cls, alpha: float, n: int, m: int = 1) -> "Kernel":
        return cls("euclidean_alpha", m, alpha, n)

    @classmethod
    def custom(cls, func, m: int = 1, extension=None) -> "Kernel":
        return cls("custom", m, 0.0, None, func, extension)

    @property
    def exponent(self) -> float:
        return self.alpha - (self.n or 0) * self.m

    # distances the kernel is built from -------------------------------------

    def kernel_dist(self, space: DiscreteSpace) -> np.ndarray:
        if self.kind == "euclidean_alpha":
            if space.points.shape[1] != self.n:
                raise InputError(f"euclidean_alpha kernel expects R^{self.n} points")
            return cdist(space.points, space.points)
        return space.dist

    def radial(self, space: DiscreteSpace, x: int, s: np.ndarray) -> np.ndarray:
        """K as a function of the summed distance s from x (fractional kinds)."""
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        pos = s > 0
        if self.kind == "cc_alpha":
            mass = space.ball_mass(x, s[pos])
            with np.errstate(divide="ignore"):
                out[pos] = s[pos] ** self.alpha / mass ** self.m
        elif self.kind == "euclidean_alpha":
            out[pos] = s[pos] ** self.exponent
            if self.exponent == 0:
                out[~pos] = 1.0
            elif self.exponent < 0:
                out[~pos] = np.inf
        else:
            raise ParameterError("custom kernels have no radial form")
        return out

    def omitted(self, s: np.ndarray, values: np.ndarray) -> np.ndarray:
        """Mask of tuples left out of sums (where K is singular)."""
        if self.kind == "cc_alpha":
            return s == 0
        if self.kind == "euclidean_alpha":
            return (s == 0) if self.exponent < 0 else np.zeros(s.shape, dtype=bool)
        return ~np.isfinite(values)

    def tensor(self, space: DiscreteSpace, x: int) -> np.ndarray:
        """K(x, y) over all of X^m, shape (N,)*m, with omitted tuples set to 0."""
        check_terms(space, self.m)
        if self.kind == "custom":
            ys = np.stack(np.indices((space.n,) * self.m), axis=-1)
            vals = np.asarray(self.func(space, x, ys), dtype=float)
            s = tuple_sums(space.dist[x], self.m)
        else:
            s = tuple_sums(self.kernel_dist(space)[x], self.m)
            vals = self.radial(space, x, s)
        return np.where(self.omitted(s, vals), 0.0, vals)

    def value(self, space: DiscreteSpace, x: int, ys) -> np.ndarray:
        """K(x, y) for an integer array of tuples of shape (..., m)."""
        ys = np.asarray(ys, dtype=int)
        if self.kind == "custom":
            return np.asarray(self.func(space, x, ys), dtype=float)
        s = self.kernel_dist(space)[x][ys].sum(axis=-1)
        return self.radial(space, x, s)

    def tilde(self, space: DiscreteSpace, xs, ys) -> np.ndarray:
        """Off-diagonal kernel K~(x_vec, y_vec) for (..., m) index arrays.

        ``rho(x_vec, y_vec) = sum_i rho(x_i, y_i)``; on the diagonal x_vec =
        (x, ..., x) it restricts to K(x, y).
        """
        xs = np.asarray(xs, dtype=int)
        ys = np.asarray(ys, dtype=int)
        if self.kind == "custom":
            if self.extension is None:
                raise ParameterError("custom kernel has no off-diagonal extension")
            return np.asarray(self.extension(space, xs, ys), dtype=float)
        D = self.kernel_dist(space)
        s = D[xs, ys].sum(axis=-1)
        out = np.full(s.shape, np.nan)
        pos = s > 0
        if self.kind == "cc_alpha":
            mass = np.ones(s.shape)
            sp = s[pos]
            for i in range(self.m):
                xi = xs[..., i][pos]
                mi = np.empty(len(xi))
                for a in range(0, len(xi), 2048):
                    sl = slice(a, a + 2048)
                    mi[sl] = (D[xi[sl]] < sp[sl, None]) @ space.measure
                mass[pos] *= mi
            with np.errstate(divide="ignore"):
                out[pos] = s[pos] ** self.alpha / mass[pos]
        else:
            out[pos] = s[pos] ** self.exponent
        return out


# phi functional --------------------------------------------------------------

@dataclass
class PhiFunctional:
    """phi(B) = sup{K(x, y) : (x, y) in B^(m+1), rho(x, y) >= c r(B)}.

    ``eta`` records the admissible radius bound r(B) <= eta diam(X) used by the
    checks; it does not restrict evaluation.
    """

    kernel: Kernel
    c: float
    eta: float = 2.0
    cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.c > 0:
            raise ParameterError("phi constant c must be positive")

    def __call__(self, space: DiscreteSpace, ball: Ball, strict: bool = True) -> float:
        return phi_of_ball(self, space, ball, strict)


def default_c(space: DiscreteSpace, balls, m: int, j_max: int = 60) -> float:
    """Largest 2^-j for which every ball's admissible tuple set is nonempty.

    The largest rho(x, y) inside B is m diam(B), so the set is nonempty iff
    c r(B) <= m diam(B).  Balls with a single point are ignored.
    """
    best = 1.0
    for b in balls:
        idx = space.ball_points(b)
        if len(idx) < 2:
            continue
        best = min(best, m * space.ball_diameter(idx) / b.radius)
    for j in range(j_max + 1):
        if 2.0 ** -j <= best:
            return 2.0 ** -j
    return 2.0 ** -j_max


def _sumset(values: np.ndarray, m: int) -> np.ndarray:
    s = np.unique(values)
    out = s
    for _ in range(m - 1):
        out = np.unique(np.add.outer(out, s).ravel())
    return out


def phi_of_ball(phi: PhiFunctional, space: DiscreteSpace, ball: Ball,
                strict: bool = True) -> float:
    """Exact sup over the finite admissible tuple set; results are cached.

    An empty admissible set raises :class:`EmptyConstraintError` when
    ``strict``; otherwise it evaluates to 0.
    """
    key = (int(ball.center), float(ball.radius))
    if key in phi.cache:
        val = phi.cache[key]
    else:
        val = _phi_uncached(phi, space, ball)
        phi.cache[key] = val
    if val is None:
        if strict:
            raise EmptyConstraintError(
                f"no admissible tuples in B({ball.center}, {ball.radius:.4g}) with "
                f"c = {phi.c}; choose a smaller c")
        return 0.0
    return val


def _phi_uncached(phi: PhiFunctional, space: DiscreteSpace, ball: Ball):
    K = phi.kernel
    m = K.m
    idx = space.ball_points(ball)
    thresh = phi.c * ball.radius
    best = -math.inf
    found = False
    radial = K.kind == "cc_alpha" or (
        K.kind == "euclidean_alpha" and np.allclose(K.kernel_dist(space), space.dist))
    if radial:
        for x in idx:
            s = _sumset(space.dist[x, idx], m)
            s = s[s >= thresh]
            if s.size == 0:
                continue
            found = True
            best = max(best, float(np.max(K.radial(space, int(x), s))))
    else:
        if len(idx) ** (m + 1) > TERM_CAP:
            raise ParameterError("ball too large for an exhaustive phi scan")
        grids = np.stack(np.meshgrid(*([idx] * m), indexing="ij"), axis=-1)
        for x in idx:
            s = space.dist[x][grids].sum(axis=-1)
            ok = s >= thresh
            if not ok.any():
                continue
            found = True
            best = max(best, float(np.max(K.value(space, int(x), grids[ok]))))
    return best if found else None


# growth and main assumption checks ---------------------------------------------

@dataclass
class GrowthReport:
    C: float
    holds: bool
    witness: dict | None
    samples: int


def growth_check(kernel: Kernel, space: DiscreteSpace, c: float = 2.0,
                 samples: int = 20000, seed=0, c_max: float | None = None) -> GrowthReport:
    """Smallest C satisfying both growth implications over sampled tuples.

    (a) K~(x, y) <= C K~(z, y) whenever rho(z, y) <= c rho(x, y);
    (b) K~(x, y) <= C K~(y, z) whenever rho(y, z) <= c rho(x, y).
    ``holds`` is False when the ratio is infinite or exceeds ``c_max``.
    """
    if c <= 1:
        raise ParameterError("growth constant c must exceed 1")
    if kernel.kind == "custom" and kernel.extension is None:
        raise ParameterError("growth check needs a kernel extension")
    rng = np.random.default_rng(seed)
    m, n = kernel.m, space.n
    xs = rng.integers(0, n, size=(samples, m))
    ys = rng.integers(0, n, size=(samples, m))
    zs = rng.integers(0, n, size=(samples, m))
    # half the z samples are drawn close to y so the preconditions bite
    near = space.order[ys, rng.integers(0, max(2, n // 4), size=ys.shape)]
    zs[: samples // 2] = near[: samples // 2]
    D = space.dist
    rxy = D[xs, ys].sum(axis=1)
    rzy = D[zs, ys].sum(axis=1)
    kxy = kernel.tilde(space, xs, ys)
    best, wit = 0.0, None
    for label, rhs_arg, r_other in (("x->z", (zs, ys), rzy), ("y->z", (ys, zs), rzy)):
        ok = (rxy > 0) & (r_other > 0) & (r_other <= c * rxy)
        if not ok.any():
            continue
        kother = kernel.tilde(space, rhs_arg[0][ok], rhs_arg[1][ok])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(kother > 0, kxy[ok] / kother,
                             np.where(kxy[ok] > 0, np.inf, 0.0))
        i = int(np.nanargmax(ratio))
        if ratio[i] > best:
            sel = np.flatnonzero(ok)[i]
            best = float(ratio[i])
            wit = {"implication": label, "x": xs[sel].tolist(), "y": ys[sel].tolist(),
                   "z": zs[sel].tolist(), "ratio": best}
    holds = math.isfinite(best) and (c_max is None or best <= c_max)
    return GrowthReport(best, holds, None if holds else wit, samples)


@dataclass
class MainAssumptionReport:
    C2: float
    stable: bool
    trace: list[tuple[float, float]]
    witness: tuple[Ball, Ball] | None
    pairs: int


def mainassump_check(phi: PhiFunctional, space: DiscreteSpace, eps: float,
                     C1: float = 2.0, pairs=None, max_balls: int = 300, levels: int = 12,
                     seed=0) -> MainAssumptionReport:
    """Smallest C2 with phi(B')mu(B')^m <= C2 (r'/r)^eps phi(B)mu(B)^m on nested pairs.

    ``pairs`` is an optional list of (inner, outer) balls; otherwise nested
    pairs are taken from a sample of the ball family with radii below
    C1 diam(X).  The trace lists C2 restricted to radius ratios >= 2^-j; the
    check is ``stable`` when the last three trace values grow by less than a
    factor 1.5.
    """
    m = phi.kernel.m
    if pairs is None:
        fam = space.ball_family()
        keep = np.flatnonzero(fam.radii < C1 * space.diam)
        keep = keep[fam.sizes[keep] >= 2]
        if len(keep) > max_balls:
            keep = np.sort(np.random.default_rng(seed).choice(keep, max_balls, replace=False))
        outer, inner = _nested_pairs(fam, keep)
        pairs = [(fam.ball(i), fam.ball(o)) for i, o in zip(inner, outer)]
    vals = []
    for bi, bo in pairs:
        if bi.radius > bo.radius:
            continue
        ti = phi_of_ball(phi, space, bi, strict=False) * space.ball_measure(bi) ** m
        to = phi_of_ball(phi, space, bo, strict=False) * space.ball_measure(bo) ** m
        rr = bi.radius / bo.radius
        if ti == 0:
            ratio = 0.0
        elif to == 0:
            ratio = math.inf
        else:
            ratio = ti / (rr ** eps * to)
        vals.append((rr, ratio, bi, bo))
    if not vals:
        return MainAssumptionReport(0.0, True, [], None, 0)
    rr = np.array([v[0] for v in vals])
    ratio = np.array([v[1] for v in vals])
    trace = []
    for j in range(levels + 1):
        sel = rr >= 2.0 ** -j
        trace.append((2.0 ** -j, float(ratio[sel].max()) if sel.any() else 0.0))
    w = int(np.argmax(ratio))
    C2 = float(ratio[w])
    tail = [t[1] for t in trace[-3:]]
    stable = math.isfinite(C2) and (tail[0] == 0 or tail[-1] < 1.5 * tail[0])
    return MainAssumptionReport(C2, bool(stable), trace, (vals[w][2], vals[w][3]), len(vals))


def phi_equivalence(phi: PhiFunctional, space: DiscreteSpace, balls) -> tuple[float, float]:
    """Range of phi(B) mu(B)^m / r(B)^alpha over the given balls (cc kernel scale)."""
    m, a = phi.kernel.m, phi.kernel.alpha
    out = []
    for b in balls:
        v = phi_of_ball(phi, space, b, strict=False)
        if v > 0:
            out.append(v * space.ball_measure(b) ** m / b.radius ** a)
    return (min(out), max(out)) if out else (math.nan, math.nan)


def family_balls(family: BallFamily, min_size: int = 2) -> list[Ball]:
    return [family.ball(b) for b in range(len(family)) if family.sizes[b] >= min_size]
