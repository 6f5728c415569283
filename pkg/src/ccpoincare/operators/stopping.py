"""Stopping-time decomposition over dyadic cubes and the packing sum."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..dyadic import DyadicTree, cube_ball
from ..errors import ParameterError
from ..space import Ball, DiscreteSpace
from .kernels import PhiFunctional, phi_of_ball
from .maximal import cube_ball_averages


def parent_comparison_constant(tree: DyadicTree, space: DiscreteSpace, m: int) -> float:
    """max over cubes below the top of (mu(B(Q*)) / mu(B(Q)))^m, Q* the parent."""
    c = 1.0
    for k in tree.level_indices[1:]:
        for q in tree.levels[k]:
            par = tree.levels[k + 1][q.parent]
            ratio = space.ball_measure(cube_ball(tree, par)) / space.ball_measure(cube_ball(tree, q))
            c = max(c, ratio ** m)
    return c


def default_stopping_base(tree: DyadicTree, space: DiscreteSpace, m: int) -> float:
    return 2.0 * max(2.0, parent_comparison_constant(tree, space, m))


@dataclass
class StoppingLevel:
    k: int
    S: np.ndarray                       # boolean mask of M_B(D) f > a^k
    cubes: list[tuple[int, int]]        # (level, index) of the maximal cubes Q_{k,j}
    E: list[np.ndarray] = field(default_factory=list)


@dataclass
class StoppingDecomposition:
    a: float
    k1: int | None
    levels: dict[int, StoppingLevel]
    gamma: float
    nested: bool
    disjoint: bool
    bounds_ok: bool
    parent_constant: float
    C_k1: float | None = None
    worst: tuple | None = None

    @property
    def empty(self) -> bool:
        return not self.levels


def stopping_decomposition(tree: DyadicTree, space: DiscreteSpace, fs, a: float | None = None,
                           phi: PhiFunctional | None = None, g=None, u=None) -> StoppingDecomposition:
    """Level sets S^k = {M_B(D) f > a^k} and their maximal cubes.

    Levels run from k1, where a^k1 < prod_i avg_X f_i <= a^(k1+1), up to the
    last nonempty level.  Q_{k,j} are the coarsest cubes whose B(Q) average
    exceeds a^k; E_{k,j} = Q_{k,j} minus S^(k+1) and gamma is the smallest
    mu(E)/mu(Q) over stopping cubes other than X.  ``bounds_ok`` records the
    two-sided bound a^k < avg <= a^(k+1) for those cubes.  With ``phi`` the
    bottom term C_k1 = phi(B(X)) mu(X)^m prod avg_X f_i avg_X(g u) mu(X) is
    also reported.
    """
    fs = [np.asarray(f, dtype=float).ravel() for f in fs]
    if any(np.any(f < 0) for f in fs):
        raise ParameterError("the stopping decomposition needs nonnegative functions")
    m = len(fs)
    c_par = parent_comparison_constant(tree, space, m)
    if a is None:
        a = 2.0 * max(2.0, c_par)
    if a <= 1:
        raise ParameterError("the stopping base a must exceed 1")

    avg_list = cube_ball_averages(tree, space, fs)
    avg = {(k, j): v for k, j, v in avg_list}
    M = np.full(space.n, 0.0)
    for k, j, v in avg_list:
        mem = tree.levels[k][j].members
        M[mem] = np.maximum(M[mem], v)
    mu_X = space.total_measure
    avg_X = 1.0
    for f in fs:
        avg_X *= float(np.sum(f * space.measure)) / mu_X
    if avg_X <= 0 or M.max() <= 0:
        return StoppingDecomposition(a, None, {}, math.nan, True, True, True, c_par)

    la = math.log(a)
    k1 = math.ceil(math.log(avg_X) / la) - 1
    while a ** k1 >= avg_X:
        k1 -= 1
    while a ** (k1 + 1) < avg_X:
        k1 += 1
    k_high = k1
    while M.max() > a ** (k_high + 1):
        k_high += 1

    levels: dict[int, StoppingLevel] = {}
    disjoint = True
    for k in range(k1, k_high + 1):
        thr = a ** k
        S = M > thr
        covered = np.zeros(space.n, dtype=bool)
        chosen = []
        for lev in tree.level_indices:
            for j, q in enumerate(tree.levels[lev]):
                if avg[(lev, j)] > thr and not covered[q.members[0]]:
                    if covered[q.members].any():
                        disjoint = False
                    covered[q.members] = True
                    chosen.append((lev, j))
        disjoint = disjoint and bool(np.array_equal(covered, S))
        levels[k] = StoppingLevel(k, S, chosen)

    nested = all(not np.any(levels[k + 1].S & ~levels[k].S) for k in range(k1, k_high))
    gamma, worst, bounds_ok = math.inf, None, True
    for k, lev in levels.items():
        S_next = levels[k + 1].S if k + 1 in levels else np.zeros(space.n, dtype=bool)
        for (ql, qj) in lev.cubes:
            q = tree.levels[ql][qj]
            E = q.members[~S_next[q.members]]
            lev.E.append(E)
            if len(q.members) == space.n:
                continue
            ratio = space.measure[E].sum() / space.measure[q.members].sum()
            if ratio < gamma:
                gamma, worst = ratio, (k, ql, qj)
            v = avg[(ql, qj)]
            if not (a ** k < v <= a ** (k + 1) * (1 + 1e-12)):
                bounds_ok = False
    if not math.isfinite(gamma):
        gamma = 1.0     # every stopping cube is X

    C_k1 = None
    if phi is not None:
        top = tree.levels[tree.k_max][0]
        gu = np.ones(space.n)
        if g is not None:
            gu = gu * np.asarray(g, dtype=float)
        if u is not None:
            gu = gu * np.asarray(u, dtype=float)
        phiX = phi_of_ball(phi, space, cube_ball(tree, top), strict=False)
        C_k1 = phiX * mu_X ** m * avg_X * float(np.sum(gu * space.measure))
    return StoppingDecomposition(a, k1, levels, float(gamma), nested, disjoint,
                                 bounds_ok, c_par, C_k1, worst)


# packing --------------------------------------------------------------------

def descendants(tree: DyadicTree, k0: int, j0: int) -> list[tuple[int, int]]:
    """All cubes contained in Q0 (Q0 included), level by level."""
    out = [(k0, j0)]
    frontier = {j0}
    for k in range(k0 - 1, tree.k_min - 1, -1):
        nxt = {j for j, q in enumerate(tree.levels[k]) if q.parent in frontier}
        out.extend((k, j) for j in sorted(nxt))
        frontier = nxt
    return out


def dyadic_ball_pairs(tree: DyadicTree) -> list[tuple[Ball, Ball]]:
    """(B(Q), B(Q0)) for every cube Q and each of its ancestors Q0 (and Q0 = Q)."""
    pairs = []
    for k, j, q in tree.cubes():
        bq = cube_ball(tree, q)
        pairs.append((bq, bq))
        kk, jj = k, j
        while tree.levels[kk][jj].parent is not None:
            jj = tree.levels[kk][jj].parent
            kk += 1
            pairs.append((bq, cube_ball(tree, tree.levels[kk][jj])))
    return pairs


@dataclass
class PackingReport:
    lhs: float
    rhs: float
    ratio: float
    C: float


def packing_constant(C2: float, eps: float, A: float) -> float:
    """C = C2 * sum_{l >= 0} A^(-l eps)."""
    if eps <= 0:
        raise ParameterError("eps must be positive")
    return C2 / (1.0 - A ** (-eps))


def packing_sum_check(tree: DyadicTree, space: DiscreteSpace, phi: PhiFunctional, g, u,
                      Q0: tuple[int, int], C2: float, eps: float) -> PackingReport:
    """Sum over cubes Q in Q0 of phi(B(Q)) mu(B(Q))^m int_Q g u against
    C phi(B(Q0)) mu(B(Q0))^m int_Q0 g u."""
    g = np.asarray(g, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(g < 0) or np.any(u < 0):
        raise ParameterError("g and u must be nonnegative")
    m = phi.kernel.m
    gu = g * u * space.measure

    def term(k, j):
        q = tree.levels[k][j]
        b = cube_ball(tree, q)
        return phi_of_ball(phi, space, b, strict=False) * space.ball_measure(b) ** m * gu[q.members].sum()

    lhs = float(sum(term(k, j) for k, j in descendants(tree, *Q0)))
    C = packing_constant(C2, eps, tree.A)
    rhs = float(C * term(*Q0)) if C2 != 0 else 0.0
    if rhs == 0 and lhs == 0:
        ratio = 0.0
    elif rhs == 0 or math.isinf(rhs):
        ratio = math.inf if rhs == 0 else 0.0
    else:
        ratio = lhs / rhs
    return PackingReport(lhs, rhs, ratio, C)
