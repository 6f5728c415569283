"""Maximal operators over the finite ball family and over dyadic cube balls.

All sups are exact: every ball of a finite space equals one of the balls in
:class:`~ccpoincare.space.BallFamily`.
"""

from __future__ import annotations

import numpy as np

from ..dyadic import DyadicTree, cube_ball
from ..errors import ParameterError
from ..space import BallFamily, DiscreteSpace, sup_over_balls_containing


def _family(space: DiscreteSpace, family: BallFamily | None) -> BallFamily:
    return family if family is not None else space.ball_family()


def multilinear_maximal(space: DiscreteSpace, fs, family: BallFamily | None = None) -> np.ndarray:
    """M_mu(f)(x) = sup over balls B containing x of prod_i avg_B |f_i|, at every x."""
    fam = _family(space, family)
    prod = np.ones(len(fam))
    for f in fs:
        prod *= fam.averages(np.abs(np.asarray(f, dtype=float)))
    return sup_over_balls_containing(fam, prod)[0]


def hardy_littlewood(space: DiscreteSpace, f, family: BallFamily | None = None) -> np.ndarray:
    return multilinear_maximal(space, [f], family)


def m_s_maximal(space: DiscreteSpace, g, s: float, family: BallFamily | None = None) -> np.ndarray:
    """M_s g = M_mu(|g|^s)^(1/s)."""
    if s < 1:
        raise ParameterError("M_s needs s >= 1")
    g = np.abs(np.asarray(g, dtype=float))
    return hardy_littlewood(space, g ** s, family) ** (1.0 / s)


def iterated_maximal(space: DiscreteSpace, f, k: int, family: BallFamily | None = None) -> np.ndarray:
    """M^k f, the k-fold composition of the Hardy-Littlewood operator (M^0 f = |f|)."""
    fam = _family(space, family)
    out = np.abs(np.asarray(f, dtype=float))
    for _ in range(k):
        out = hardy_littlewood(space, out, fam)
    return out


def gamma_maximal(space: DiscreteSpace, f, gamma, family: BallFamily | None = None) -> np.ndarray:
    """M_gamma f(x) = sup over balls B containing x of gamma(B) int_B |f|.

    ``gamma`` is either an array with one value per family ball or a callable
    ``gamma(family) -> array``.
    """
    fam = _family(space, family)
    g = gamma(fam) if callable(gamma) else np.asarray(gamma, dtype=float)
    vals = g * fam.integrals(np.abs(np.asarray(f, dtype=float)))
    return sup_over_balls_containing(fam, vals)[0]


def cube_ball_averages(tree: DyadicTree, space: DiscreteSpace, fs):
    """(level, cube index, prod_i avg_B(Q) |f_i|) for every cube."""
    out = []
    w = [np.abs(np.asarray(f, dtype=float)) * space.measure for f in fs]
    for k, j, q in tree.cubes():
        mask = space.ball_mask(cube_ball(tree, q))
        mass = space.measure[mask].sum()
        prod = 1.0
        for wi in w:
            prod *= wi[mask].sum() / mass
        out.append((k, j, prod))
    return out


def dyadic_maximal(tree: DyadicTree, space: DiscreteSpace, fs) -> np.ndarray:
    """M_B(D)(f)(x) = sup over cubes Q containing x of prod_i avg_B(Q) |f_i|."""
    out = np.full(space.n, -np.inf)
    for k, j, val in cube_ball_averages(tree, space, fs):
        members = tree.levels[k][j].members
        out[members] = np.maximum(out[members], val)
    return out
