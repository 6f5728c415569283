import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccpoincare.dyadic import build_dyadic
from ccpoincare.errors import InputError, ParameterError
from ccpoincare.grid import GridSpec
from ccpoincare.operators import (Kernel, PhiFunctional, discretization_c,
                                  discretize_bound_check, eval_I_alpha, eval_potential,
                                  potential_all, potential_operator_norm)
from ccpoincare.space import DiscreteSpace


def random_space(seed, n=12, dim=2):
    r = np.random.default_rng(seed)
    return DiscreteSpace.euclidean(r.random((n, dim)), r.uniform(0.2, 1.0, n))


@given(st.integers(0, 10_000), st.sampled_from([1, 2, 3]), st.floats(0.3, 2.0))
def test_potential_matches_tuple_sum(seed, m, alpha):
    sp = random_space(seed, n=9)
    r = np.random.default_rng(seed)
    fs = [r.normal(size=sp.n) for _ in range(m)]
    x = int(r.integers(sp.n))
    a = eval_potential(sp, Kernel.cc_alpha(alpha, m), fs, x)
    b = eval_I_alpha(sp, alpha, fs, x)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


def test_potential_multilinear():
    sp = random_space(1)
    r = np.random.default_rng(1)
    f, g, h = r.normal(size=(3, sp.n))
    K = Kernel.cc_alpha(1.0, 2)
    lhs = eval_potential(sp, K, [2 * f + g, h], 3)
    rhs = 2 * eval_potential(sp, K, [f, h], 3) + eval_potential(sp, K, [g, h], 3)
    assert lhs == pytest.approx(rhs)


def test_potential_input_errors():
    sp = random_space(2)
    with pytest.raises(InputError):
        eval_potential(sp, Kernel.cc_alpha(1, 2), [np.ones(sp.n)], 0)
    with pytest.raises(InputError):
        eval_potential(sp, Kernel.cc_alpha(1), [np.ones(3)], 0)
    with pytest.raises(ParameterError):
        eval_I_alpha(sp, 0.0, [np.ones(sp.n)], 0)


@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("dim", [1, 2])
def test_discretization_margin(m, dim):
    r = np.random.default_rng(10 * m + dim)
    n = 24 if dim == 1 else 16
    sp = DiscreteSpace.euclidean(r.random((n, dim)), r.uniform(0.5, 1.5, n))
    tree = build_dyadic(sp)
    phi = PhiFunctional(Kernel.cc_alpha(1.0, m), discretization_c(tree))
    for _ in range(5):
        fs = [r.exponential(size=n) * (r.random(n) < 0.7) for _ in range(m)]
        rep = discretize_bound_check(sp, tree, phi, fs)
        assert rep.holds, rep.margin
        assert rep.ratio_quantiles["1.0"] <= 1 + 1e-12


def test_discretization_rejects_negative():
    sp = random_space(3)
    tree = build_dyadic(sp)
    phi = PhiFunctional(Kernel.cc_alpha(1.0), discretization_c(tree))
    with pytest.raises(ParameterError):
        discretize_bound_check(sp, tree, phi, [-np.ones(sp.n)])


def test_operator_norm_bounds_rayleigh_quotients():
    sp = DiscreteSpace.from_grid(GridSpec.uniform(30, 1))
    mask = np.ones(sp.n, dtype=bool)
    norm = potential_operator_norm(sp, mask)
    r = np.random.default_rng(0)
    for _ in range(10):
        f = r.normal(size=sp.n)
        If = potential_all(sp, Kernel.cc_alpha(1.0), [f])
        lhs = np.sqrt(np.sum(If ** 2 * sp.measure))
        assert lhs <= norm * np.sqrt(np.sum(f ** 2 * sp.measure)) * (1 + 1e-10)
    assert potential_operator_norm(sp, np.zeros(sp.n, dtype=bool)) == 0.0
