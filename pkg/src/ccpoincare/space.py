"""Finite spaces of homogeneous type: a point set, a quasi-metric and a measure.

Balls are open, ``B(x, r) = {y : rho(x, y) < r}``.  In a finite space every
ball coincides with a closed ball ``{y : rho(x, y) <= d}`` for some distance
``d`` from its center, so sup-over-balls quantities are computed exactly on
the finite :class:`BallFamily` of such balls, each represented by the open
radius ``d + eps`` with ``eps`` below the smallest gap between distances.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial.distance import cdist

from .errors import CapacityError, DiagnosticError, InputError, ParameterError
from .grid import GridSpec

MAX_POINTS = 5000


@dataclass(frozen=True)
class Ball:
    center: int
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ParameterError(f"negative radius {self.radius}")

    def scaled(self, theta: float) -> "Ball":
        return Ball(self.center, theta * self.radius)


def measure_kappa(dist: np.ndarray, samples: int | None = None, rng=None) -> float:
    """Smallest kappa with rho(x,y) <= kappa (rho(x,z) + rho(z,y)).

    Exhaustive (min-plus over z) when ``samples`` is None, otherwise a max
    over ``samples`` random triples.
    """
    n = dist.shape[0]
    if n < 3:
        return 1.0
    if samples is None:
        best = 1.0
        via = np.full((n, n), np.inf)
        for z in range(n):
            np.minimum(via, dist[:, z][:, None] + dist[z, :][None, :], out=via)
        off = ~np.eye(n, dtype=bool)
        ok = off & (via > 0)
        if np.any(ok):
            best = max(best, float(np.max(dist[ok] / via[ok])))
        return best
    rng = np.random.default_rng(rng)
    x, y, z = rng.integers(0, n, size=(3, samples))
    den = dist[x, z] + dist[z, y]
    num = dist[x, y]
    ok = den > 0
    return max(1.0, float(np.max(num[ok] / den[ok]))) if np.any(ok) else 1.0


@dataclass(frozen=True, eq=False)
class DiscreteSpace:
    points: np.ndarray
    measure: np.ndarray
    dist: np.ndarray
    kappa: float = 1.0
    grid: GridSpec | None = None
    label: str = ""

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[0] == 1 and np.ndim(self.points) == 1 and len(self.points) > 1:
            pts = pts.T
        mu = np.asarray(self.measure, dtype=float).ravel()
        d = np.asarray(self.dist, dtype=float)
        n = pts.shape[0]
        if n > MAX_POINTS:
            raise CapacityError(f"{n} points exceeds the cap of {MAX_POINTS}")
        if mu.shape != (n,) or d.shape != (n, n):
            raise InputError("points, measure and dist have inconsistent sizes")
        if np.any(mu < 0) or not np.all(np.isfinite(mu)) or mu.sum() <= 0:
            raise InputError("measure must be finite, nonnegative, with positive total")
        if np.any(np.diag(d) != 0) or np.any(d < 0):
            raise InputError("dist must be nonnegative with zero diagonal")
        scale = max(float(np.max(d)), 1.0) if n else 1.0
        if np.max(np.abs(d - d.T), initial=0.0) > 1e-12 * scale:
            raise InputError("dist must be symmetric")
        if self.kappa < 1:
            raise ParameterError("kappa must be >= 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "measure", mu)
        object.__setattr__(self, "dist", 0.5 * (d + d.T))

    # constructors ---------------------------------------------------------

    @classmethod
    def from_metric(cls, points, measure, dist, kappa: float | None = None,
                    grid: GridSpec | None = None, label: str = "") -> "DiscreteSpace":
        dist = np.asarray(dist, dtype=float)
        if kappa is None:
            n = dist.shape[0]
            kappa = measure_kappa(dist) if n <= 400 else measure_kappa(dist, 20000, 0)
        return cls(points, measure, dist, float(kappa), grid, label)

    @classmethod
    def euclidean(cls, points, measure=None, label: str = "euclidean") -> "DiscreteSpace":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        mu = np.full(len(pts), 1.0 / len(pts)) if measure is None else measure
        return cls(pts, mu, cdist(pts, pts), 1.0, None, label)

    @classmethod
    def from_grid(cls, grid: GridSpec, label: str = "") -> "DiscreteSpace":
        """Euclidean metric on grid points with cell-volume masses."""
        pts = grid.points()
        mu = np.full(grid.size, grid.cell_volume)
        return cls(pts, mu, cdist(pts, pts), 1.0, grid, label or "grid")

    # basic quantities -----------------------------------------------------

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def total_measure(self) -> float:
        return float(self.measure.sum())

    @cached_property
    def diam(self) -> float:
        return float(self.dist.max())

    @cached_property
    def order(self) -> np.ndarray:
        """Row c lists the point indices by increasing distance from c."""
        return np.argsort(self.dist, axis=1, kind="stable")

    @cached_property
    def sorted_dist(self) -> np.ndarray:
        return np.take_along_axis(self.dist, self.order, axis=1)

    @cached_property
    def rank(self) -> np.ndarray:
        """rank[c, x] = position of x in order[c]."""
        r = np.empty_like(self.order)
        rows = np.arange(self.n)[:, None]
        r[rows, self.order] = np.arange(self.n)[None, :]
        return r

    @cached_property
    def cum_mass(self) -> np.ndarray:
        """cum_mass[c, k] = mass of the k nearest points to c."""
        m = self.measure[self.order]
        return np.concatenate([np.zeros((self.n, 1)), np.cumsum(m, axis=1)], axis=1)

    @cached_property
    def radius_eps(self) -> float:
        """Half the smallest positive gap between distances from a common center."""
        gaps = np.diff(self.sorted_dist, axis=1)
        pos = gaps[gaps > 0]
        if pos.size == 0:
            return 0.5
        return 0.5 * float(pos.min())

    @cached_property
    def min_positive_distance(self) -> float:
        pos = self.dist[self.dist > 0]
        return float(pos.min()) if pos.size else 0.0

    def digest(self) -> str:
        h = hashlib.sha256()
        for arr in (self.points, self.measure, self.dist):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()[:16]

    # balls ----------------------------------------------------------------

    def _check_center(self, c: int):
        if not (0 <= int(c) < self.n):
            raise InputError(f"center index {c} out of range [0, {self.n})")

    def ball_points(self, ball: Ball) -> np.ndarray:
        self._check_center(ball.center)
        return np.flatnonzero(self.dist[ball.center] < ball.radius)

    def ball_mask(self, ball: Ball) -> np.ndarray:
        self._check_center(ball.center)
        return self.dist[ball.center] < ball.radius

    def ball_measure(self, ball: Ball) -> float:
        self._check_center(ball.center)
        return float(self.ball_mass(ball.center, ball.radius))

    def ball_mass(self, center: int, radii):
        """Open-ball masses mu(B(center, r)) for an array of radii."""
        k = np.searchsorted(self.sorted_dist[center], radii, side="left")
        return self.cum_mass[center][k]

    def ball_family(self, centers=None) -> "BallFamily":
        return BallFamily.build(self, centers)

    def ball_diameter(self, idx: np.ndarray) -> float:
        if len(idx) < 2:
            return 0.0
        return float(self.dist[np.ix_(idx, idx)].max())


@dataclass(frozen=True, eq=False)
class BallFamily:
    """All distinct balls about the given centers.

    Ball ``b`` is the set ``order[centers[b], :sizes[b]]``; balls are grouped
    by center (ascending) and, within a center, by increasing size.
    """

    space: DiscreteSpace
    centers: np.ndarray
    sizes: np.ndarray
    radii: np.ndarray
    _slices: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, space: DiscreteSpace, centers=None) -> "BallFamily":
        if centers is None:
            centers = np.arange(space.n)
        centers = np.unique(np.asarray(centers, dtype=int))
        eps = space.radius_eps
        cs, ss, rs = [], [], []
        slices = {}
        start = 0
        for c in centers:
            d = space.sorted_dist[c]
            last = np.flatnonzero(np.append(d[1:] != d[:-1], True))
            cs.append(np.full(len(last), c))
            ss.append(last + 1)
            rs.append(d[last] + eps)
            slices[int(c)] = slice(start, start + len(last))
            start += len(last)
        return cls(space, np.concatenate(cs), np.concatenate(ss),
                   np.concatenate(rs), slices)

    def __len__(self) -> int:
        return len(self.centers)

    def ball(self, b: int) -> Ball:
        return Ball(int(self.centers[b]), float(self.radii[b]))

    def members(self, b: int) -> np.ndarray:
        return self.space.order[self.centers[b], : self.sizes[b]]

    def center_slice(self, c: int) -> slice:
        return self._slices[int(c)]

    def integrals(self, values: np.ndarray) -> np.ndarray:
        """Integral of ``values`` over every ball (weighted by the measure)."""
        sp = self.space
        out = np.empty(len(self))
        wv = np.asarray(values, dtype=float) * sp.measure
        for c, sl in self._slices.items():
            cs = np.cumsum(wv[sp.order[c]])
            out[sl] = cs[self.sizes[sl] - 1]
        return out

    @cached_property
    def masses(self) -> np.ndarray:
        return self.integrals(np.ones(self.space.n))

    def averages(self, values: np.ndarray) -> np.ndarray:
        m = self.masses
        integ = self.integrals(values)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(m > 0, integ / np.where(m > 0, m, 1.0), 0.0)

    @cached_property
    def diameters(self) -> np.ndarray:
        sp = self.space
        out = np.empty(len(self))
        for c, sl in self._slices.items():
            o = sp.order[c]
            sub = sp.dist[np.ix_(o, o)]
            row = np.max(np.tril(sub), axis=1)
            running = np.maximum.accumulate(row)
            out[sl] = running[self.sizes[sl] - 1]
        return out


def sup_over_balls_containing(family: BallFamily, values: np.ndarray):
    """For every point x, the sup of ``values[b]`` over family balls containing x.

    Returns ``(sup, argball)``; ties go to the smallest center, then the
    smallest ball.  Points contained in no family ball get ``-inf`` and -1.
    """
    sp = family.space
    n = sp.n
    best = np.full(n, -np.inf)
    arg = np.full(n, -1, dtype=int)
    values = np.asarray(values, dtype=float)
    for c, sl in sorted(family._slices.items()):
        v = values[sl]
        sizes = family.sizes[sl]
        k = len(v)
        sufmax = np.maximum.accumulate(v[::-1])[::-1]
        record = v == sufmax
        nxt = np.where(record, np.arange(k), k)
        nxt = np.minimum.accumulate(nxt[::-1])[::-1]
        j = np.searchsorted(sizes, sp.rank[c], side="right")
        inside = j < k
        jj = np.minimum(j, k - 1)
        cand = np.where(inside, sufmax[jj], -np.inf)
        upd = cand > best
        best[upd] = cand[upd]
        arg[upd] = sl.start + nxt[jj[upd]]
    return best, arg


# diagnostics ---------------------------------------------------------------

@dataclass
class DoublingReport:
    L: float
    witness: tuple[int, float] | None
    skipped: list[tuple[int, float]]


def doubling_constant(space: DiscreteSpace, radii, centers=None) -> DoublingReport:
    """Max over sampled (x, r) of mu(B(x, 2r)) / mu(B(x, r))."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(radii <= 0):
        raise ParameterError("sample radii must be positive")
    centers = range(space.n) if centers is None else centers
    L, witness, skipped = 1.0, None, []
    for c in centers:
        inner = space.ball_mass(c, radii)
        outer = space.ball_mass(c, 2 * radii)
        for r, a, b in zip(radii, inner, outer):
            if a <= 0:
                skipped.append((int(c), float(r)))
                continue
            if b / a > L:
                L, witness = b / a, (int(c), float(r))
    return DoublingReport(float(L), witness, skipped)


@dataclass
class ReverseDoublingReport:
    c: float
    delta: float
    worst_pair: tuple[Ball, Ball] | None
    pairs: int
    violated: bool


def _nested_pairs(family: BallFamily, idx: np.ndarray):
    """Pairs (outer, inner) of family balls with inner subset of outer."""
    n = family.space.n
    mem = np.zeros((len(idx), n), dtype=bool)
    for row, b in enumerate(idx):
        mem[row, family.members(b)] = True
    outside = (~mem).astype(np.int32)
    # inner i is contained in outer o  <=>  |inner \ outer| == 0
    spill = mem.astype(np.int32) @ outside.T
    inner, outer = np.nonzero(spill == 0)
    return idx[outer], idx[inner]


def reverse_doubling_check(space: DiscreteSpace, eta: float = 2.0, delta: float | None = 1.0,
                           c_min: float = 1e-2, max_balls: int = 400,
                           seed=0) -> ReverseDoublingReport:
    """Largest c with mu(B1)/mu(B2) >= c (r1/r2)^delta over nested sampled pairs.

    Balls with a single point are left out of the sample.

    ``delta=None`` fits the exponent by least squares on log-ratios of
    strictly nested pairs.  ``violated`` flags c < c_min.
    """
    if eta <= 1:
        raise ParameterError("eta must exceed 1")
    fam = space.ball_family()
    # singletons have no meaningful radius in a finite space
    keep = np.flatnonzero((fam.radii <= eta * space.diam + space.radius_eps) & (fam.sizes >= 2))
    if len(keep) > max_balls:
        keep = np.sort(np.random.default_rng(seed).choice(keep, max_balls, replace=False))
    outer, inner = _nested_pairs(fam, keep)
    if len(outer) == 0:
        raise DiagnosticError("no nested ball pairs in the sample")
    m = fam.masses
    mratio = m[outer] / m[inner]
    rratio = fam.radii[outer] / fam.radii[inner]
    if delta is None:
        strict = (fam.sizes[outer] > fam.sizes[inner]) & (rratio > 1)
        if strict.sum() < 2:
            delta = 1.0
        else:
            delta = float(np.polyfit(np.log(rratio[strict]), np.log(mratio[strict]), 1)[0])
    vals = mratio / rratio ** delta
    w = int(np.argmin(vals))
    c = float(vals[w])
    pair = (fam.ball(outer[w]), fam.ball(inner[w]))
    return ReverseDoublingReport(c, float(delta), pair, len(outer), c < c_min)
