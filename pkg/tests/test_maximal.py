import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccpoincare.dyadic import build_dyadic, cube_ball
from ccpoincare.errors import ParameterError
from ccpoincare.operators import (dyadic_maximal, gamma_maximal, hardy_littlewood,
                                  iterated_maximal, m_s_maximal, multilinear_maximal)
from ccpoincare.space import DiscreteSpace
from tests.conftest import brute_balls


def random_space(seed, n):
    r = np.random.default_rng(seed)
    return DiscreteSpace.euclidean(r.random((n, 2)), r.uniform(0.2, 1.0, n))


def brute_multilinear(space, fs, gamma=None):
    out = np.full(space.n, -np.inf)
    for _, mask in brute_balls(space):
        mass = space.measure[mask].sum()
        if gamma is None:
            val = np.prod([np.sum(np.abs(f)[mask] * space.measure[mask]) / mass for f in fs])
        else:
            val = gamma(mass) * np.sum(np.abs(fs[0])[mask] * space.measure[mask])
        out[mask] = np.maximum(out[mask], val)
    return out


@given(st.integers(0, 10_000), st.integers(2, 20), st.integers(1, 3))
def test_multilinear_maximal_brute_force(seed, n, m):
    sp = random_space(seed, n)
    fs = list(np.random.default_rng(seed).normal(size=(m, n)))
    got = multilinear_maximal(sp, fs)
    assert np.allclose(got, brute_multilinear(sp, fs), rtol=1e-12)
    # the product of linear maximal functions dominates exactly
    prod = np.prod([hardy_littlewood(sp, f) for f in fs], axis=0)
    assert np.all(got <= prod * (1 + 1e-14))


@given(st.integers(0, 10_000), st.integers(2, 20))
def test_gamma_maximal_brute_force(seed, n):
    sp = random_space(seed, n)
    f = np.random.default_rng(seed).normal(size=n)
    gam = lambda fam: fam.masses ** -0.5
    got = gamma_maximal(sp, f, gam)
    assert np.allclose(got, brute_multilinear(sp, [f], gamma=lambda m: m ** -0.5))
    # gamma = 1 / mu collapses to the Hardy-Littlewood operator
    assert np.allclose(gamma_maximal(sp, f, lambda fam: 1 / fam.masses), hardy_littlewood(sp, f))


def test_m_s_and_iterates(small_random):
    f = np.random.default_rng(0).normal(size=small_random.n)
    m2 = m_s_maximal(small_random, f, 2.0)
    assert np.allclose(m2, np.sqrt(hardy_littlewood(small_random, f ** 2)))
    assert np.all(m2 >= hardy_littlewood(small_random, f) - 1e-12)
    assert np.allclose(iterated_maximal(small_random, f, 0), np.abs(f))
    m1, mm = (iterated_maximal(small_random, f, k) for k in (1, 2))
    assert np.allclose(m1, hardy_littlewood(small_random, f))
    assert np.all(mm >= m1 - 1e-12)
    with pytest.raises(ParameterError):
        m_s_maximal(small_random, f, 0.5)


def test_dyadic_maximal_brute_force(small_random):
    sp = small_random
    tree = build_dyadic(sp)
    r = np.random.default_rng(1)
    fs = [r.random(sp.n), r.random(sp.n)]
    want = np.full(sp.n, -np.inf)
    for _, _, q in tree.cubes():
        mask = sp.ball_mask(cube_ball(tree, q))
        avg = np.prod([np.sum(f[mask] * sp.measure[mask]) / sp.measure[mask].sum() for f in fs])
        for x in q.members:
            want[x] = max(want[x], avg)
    assert np.allclose(dyadic_maximal(tree, sp, fs), want)
    assert np.all(dyadic_maximal(tree, sp, fs) <= multilinear_maximal(sp, fs) + 1e-12)
