"""Multilinear potential operators and the dyadic discretization bound."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dyadic import DyadicTree, cube_ball
from ..errors import InputError, ParameterError
from ..space import Ball, DiscreteSpace
from .kernels import TERM_CAP, Kernel, PhiFunctional, check_terms, phi_of_ball


def _as_functions(space: DiscreteSpace, fs, m: int | None = None) -> list[np.ndarray]:
    fs = [np.asarray(f, dtype=float).ravel() for f in fs]
    if m is not None and len(fs) != m:
        raise InputError(f"expected {m} functions, got {len(fs)}")
    for f in fs:
        if f.shape != (space.n,):
            raise InputError("every function needs one value per point")
    return fs


def eval_I_alpha(space: DiscreteSpace, alpha: float, fs, x: int) -> float:
    """Multilinear fractional integral at x, summed tuple by tuple.

    sum over y in X^m with rho(x, y) > 0 of
    f(y) rho(x, y)^alpha / mu(B(x, rho(x, y)))^m * prod mu(y_i).
    Ball masses are recomputed by direct comparison for every tuple.
    """
    if alpha <= 0:
        raise ParameterError("alpha must be positive")
    fs = _as_functions(space, fs)
    m = len(fs)
    check_terms(space, m)
    n = space.n
    d = space.dist[x]
    w = [f * space.measure for f in fs]
    total = 0.0
    flat = n ** m
    chunk = max(1, min(flat, 2_000_000 // max(n, 1)))
    for start in range(0, flat, chunk):
        lin = np.arange(start, min(flat, start + chunk))
        ys = np.unravel_index(lin, (n,) * m)
        s = np.zeros(len(lin))
        prod = np.ones(len(lin))
        for i in range(m):
            s += d[ys[i]]
            prod *= w[i][ys[i]]
        keep = (s > 0) & (prod != 0)
        if not keep.any():
            continue
        s, prod = s[keep], prod[keep]
        mass = (d[None, :] < s[:, None]) @ space.measure
        total += float(np.sum(prod * s ** alpha / mass ** m))
    return total


def eval_potential(space: DiscreteSpace, kernel: Kernel, fs, x: int) -> float:
    """T(f)(x) = sum over X^m of K(x, y) f_1(y_1)...f_m(y_m) mu(y_1)...mu(y_m)."""
    fs = _as_functions(space, fs, kernel.m)
    T = kernel.tensor(space, x)
    for f in reversed(fs):
        T = T @ (f * space.measure)
    return float(T)


def potential_all(space: DiscreteSpace, kernel: Kernel, fs) -> np.ndarray:
    """T(f) at every point."""
    if kernel.m * space.n ** (kernel.m + 1) > 50 * TERM_CAP:
        raise ParameterError("too many terms for a full potential evaluation")
    return np.array([eval_potential(space, kernel, fs, x) for x in range(space.n)])


# discretization -------------------------------------------------------------

def discretization_c(tree: DyadicTree) -> float:
    """The phi constant c = 1/(2 kappa a1 A) under which each tuple is charged
    to a cube at the level matching its size."""
    return 1.0 / (2 * tree.kappa * tree.a1 * tree.A)


def discretization_levels(tree: DyadicTree, space: DiscreteSpace, m: int):
    """(level, center, members) for every cube, with X repeated above the top
    level until A^l >= m diam(X)."""
    out = [(k, q.center, q.members) for k, _, q in tree.cubes()]
    top = tree.levels[tree.k_max][0]
    l = tree.k_max
    while tree.A ** l < m * space.diam:
        l += 1
        out.append((l, top.center, top.members))
    return out


@dataclass
class DiscretizationReport:
    lhs: np.ndarray
    rhs: np.ndarray
    margin: float
    ratio_quantiles: dict
    c: float

    @property
    def holds(self) -> bool:
        return self.margin >= -1e-12


def discretize_bound_check(space: DiscreteSpace, tree: DyadicTree, phi: PhiFunctional,
                           fs, lhs: np.ndarray | None = None) -> DiscretizationReport:
    """Compare T(f)(x) with sum over cubes Q containing x of phi(B(Q)) prod_i int_B(Q) f_i.

    ``phi.c`` should equal :func:`discretization_c`; ``lhs`` may be supplied
    to reuse a potential already computed.
    """
    K = phi.kernel
    fs = _as_functions(space, fs, K.m)
    if any(np.any(f < 0) for f in fs):
        raise ParameterError("the discretization bound needs nonnegative functions")
    if lhs is None:
        lhs = potential_all(space, K, fs)
    rhs = np.zeros(space.n)
    for k, center, members in discretization_levels(tree, space, K.m):
        ball = Ball(center, 2 * tree.kappa * tree.a1 * tree.A ** k)
        mask = space.ball_mask(ball)
        prod = 1.0
        for f in fs:
            prod *= float(np.sum((f * space.measure)[mask]))
        if prod == 0:
            continue
        rhs[members] += phi_of_ball(phi, space, ball, strict=False) * prod
    diff = rhs - lhs
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, 0.0))
    q = {str(p): float(np.quantile(ratio, p)) for p in (0.0, 0.5, 0.9, 1.0)}
    return DiscretizationReport(lhs, rhs, float(diff.min()) if len(diff) else 0.0, q, phi.c)


def cube_ball_of(tree: DyadicTree, k: int, j: int) -> Ball:
    return cube_ball(tree, tree.levels[k][j])


def potential_operator_norm(space: DiscreteSpace, mask: np.ndarray, alpha: float = 1.0) -> float:
    """L2(mu) -> L2(mu) norm of the linear fractional integral restricted to a set.

    Uses the kernel rho^alpha / mu(B(x, rho)) on mask x mask, symmetrized by
    the measure weights.
    """
    idx = np.flatnonzero(mask)
    d = space.dist[np.ix_(idx, idx)]
    Kmat = np.zeros_like(d)
    for r, x in enumerate(idx):
        row = d[r]
        pos = row > 0
        Kmat[r, pos] = row[pos] ** alpha / space.ball_mass(int(x), row[pos])
    w = np.sqrt(space.measure[idx])
    op = w[:, None] * Kmat * w[None, :]
    return float(np.linalg.norm(op, 2)) if op.size else 0.0

