import numpy as np
import pytest

from ccpoincare.dyadic import build_dyadic, cube_ball
from ccpoincare.errors import ParameterError
from ccpoincare.grid import GridSpec
from ccpoincare.operators import (Kernel, PhiFunctional, default_stopping_base, descendants,
                                  discretization_c, dyadic_ball_pairs, mainassump_check, packing_constant,
                                  packing_sum_check, stopping_decomposition)
from ccpoincare.space import DiscreteSpace


@pytest.fixture(scope="module")
def line():
    sp = DiscreteSpace.from_grid(GridSpec.uniform(80, 1))
    return sp, build_dyadic(sp)


def bump(sp, center, width):
    x = sp.points[:, 0]
    return np.maximum(0.0, 1 - np.abs(x - center) / width) / width


@pytest.mark.parametrize("width", [0.1, 0.2, 0.4])
def test_stopping_on_bumps(line, width):
    sp, tree = line
    dec = stopping_decomposition(tree, sp, [bump(sp, 0.37, width)])
    assert dec.a == default_stopping_base(tree, sp, 1)
    assert not dec.empty
    assert dec.gamma > 0
    assert dec.nested and dec.disjoint and dec.bounds_ok
    for lev in dec.levels.values():
        # maximal cubes exactly tile the level set
        covered = np.zeros(sp.n, dtype=bool)
        for (k, j) in lev.cubes:
            covered[tree.levels[k][j].members] = True
        assert np.array_equal(covered, lev.S)


def test_stopping_bilinear(line):
    sp, tree = line
    fs = [bump(sp, 0.3, 0.15), bump(sp, 0.4, 0.2)]
    dec = stopping_decomposition(tree, sp, fs)
    assert dec.gamma > 0 and dec.nested
    assert dec.a >= 4


def test_unresolved_spike_needs_larger_base(line):
    # mass on a single edge node: every fine cube ball near it sees the spike
    sp, tree = line
    f = np.zeros(sp.n)
    f[0] = 1.0
    assert stopping_decomposition(tree, sp, [f]).gamma == 0.0
    assert stopping_decomposition(tree, sp, [f], a=100.0).gamma > 0


def test_packing_needs_phi_on_the_top_ball(line):
    # with c = 0.25 the top cube ball is too large for any admissible tuple
    sp, tree = line
    phi = PhiFunctional(Kernel.cc_alpha(1.0), c=0.25)
    assert mainassump_check(phi, sp, eps=1.0, pairs=dyadic_ball_pairs(tree)).C2 == np.inf


def test_density_can_vanish_at_the_default_base():
    sp = DiscreteSpace.from_grid(GridSpec.uniform(320, 1))
    tree = build_dyadic(sp)
    f = bump(sp, 0.679, 0.052)
    dec = stopping_decomposition(tree, sp, [f])
    assert dec.gamma == 0.0
    # independent check: every point of the worst cube has a cube ball average above a^(k+1)
    k, ql, qj = dec.worst
    M = np.zeros(sp.n)
    for _, _, q in tree.cubes():
        mask = sp.ball_mask(cube_ball(tree, q))
        M[q.members] = np.maximum(M[q.members], np.sum(f[mask] * sp.measure[mask]) / sp.measure[mask].sum())
    assert M[tree.levels[ql][qj].members].min() > dec.a ** (k + 1)
    assert stopping_decomposition(tree, sp, [f], a=32.0).gamma > 0


def test_stopping_bottom_term(line):
    sp, tree = line
    phi = PhiFunctional(Kernel.cc_alpha(1.0), c=0.05)
    dec = stopping_decomposition(tree, sp, [np.ones(sp.n)], phi=phi, g=np.ones(sp.n))
    assert dec.C_k1 > 0


def test_stopping_degenerate_and_errors(line):
    sp, tree = line
    assert stopping_decomposition(tree, sp, [np.zeros(sp.n)]).empty
    with pytest.raises(ParameterError):
        stopping_decomposition(tree, sp, [-np.ones(sp.n)])
    with pytest.raises(ParameterError):
        stopping_decomposition(tree, sp, [np.ones(sp.n)], a=1.0)


def test_descendants_cover_cube(line):
    sp, tree = line
    k = tree.k_max - 1
    for j, q in enumerate(tree.levels[k]):
        desc = descendants(tree, k, j)
        bottom = [jj for kk, jj in desc if kk == tree.k_min]
        members = sorted(int(tree.levels[tree.k_min][jj].members[0]) for jj in bottom)
        assert members == sorted(q.members.tolist())


def test_packing_ratio_at_most_one(line):
    sp, tree = line
    alpha = 1.0
    phi = PhiFunctional(Kernel.cc_alpha(alpha), c=discretization_c(tree))
    C2 = mainassump_check(phi, sp, eps=alpha, pairs=dyadic_ball_pairs(tree)).C2
    assert 0 < C2 < np.inf
    r = np.random.default_rng(0)
    cubes = [(k, j) for k, j, _ in tree.cubes()]
    for _ in range(15):
        g, u = r.exponential(size=(2, sp.n))
        Q0 = cubes[int(r.integers(len(cubes)))]
        rep = packing_sum_check(tree, sp, phi, g, u, Q0, C2, alpha)
        assert rep.ratio <= 1 + 1e-12
        assert rep.C == pytest.approx(packing_constant(C2, alpha, tree.A))


def test_packing_errors(line):
    sp, tree = line
    phi = PhiFunctional(Kernel.cc_alpha(1.0), c=0.25)
    with pytest.raises(ParameterError):
        packing_constant(1.0, 0.0, 4.0)
    with pytest.raises(ParameterError):
        packing_sum_check(tree, sp, phi, -np.ones(sp.n), np.ones(sp.n), (tree.k_max, 0), 1.0, 1.0)
