import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccpoincare.errors import InputError, ParameterError
from ccpoincare.operators import hardy_littlewood
from ccpoincare.orlicz import (YoungFunction, bp_condition_check, conjugate,
                               family_luxemburg, generalized_holder_check,
                               inverse_product_bounds, llogl, orlicz_ball_norm,
                               orlicz_maximal, parse_young)
from ccpoincare.space import Ball, DiscreteSpace
from tests.conftest import brute_balls


def random_space(seed, n=15):
    r = np.random.default_rng(seed)
    return DiscreteSpace.euclidean(r.random((n, 2)), r.uniform(0.2, 1.0, n))


def power_average(space, mask, f, r):
    w = space.measure[mask]
    return (np.sum(np.abs(f[mask]) ** r * w) / w.sum()) ** (1 / r)


PSIS = [YoungFunction.power(2), YoungFunction.power(3.5), YoungFunction.power_log(2, 1.5),
        YoungFunction.power_log(3, -1.5), llogl(1.5, 0.5)]


@pytest.mark.parametrize("psi", PSIS, ids=lambda p: p.label)
def test_normalization_and_shape(psi):
    assert psi(1.0) == pytest.approx(1.0, rel=1e-12)
    assert psi(0.0) == 0.0
    assert psi.is_young()
    C, N = psi.doubling()
    assert N == 1.0 and 2 <= C < 20
    y = np.array([1e-3, 0.5, 7.0, 1e4])
    assert np.allclose(psi(psi.inverse(y)), y, rtol=1e-8)


def test_constructor_errors():
    with pytest.raises(ParameterError):
        YoungFunction.power(0.5)
    with pytest.raises(ParameterError):
        YoungFunction.power_log(1, -1)
    with pytest.raises(ParameterError):
        YoungFunction("other")
    with pytest.raises(InputError):
        YoungFunction.tabulated([0, 1, 1], [0, 1, 2])
    with pytest.raises(InputError):
        YoungFunction.tabulated([1, 2, 3], [1, 2, 3])


def test_tabulated_follows_table():
    t = np.linspace(0, 4, 41)
    psi = YoungFunction.tabulated(t, t ** 2)
    s = np.array([0.3, 1.7, 3.9, 8.0])
    assert np.allclose(psi(s), s ** 2, rtol=1e-3)
    assert psi.is_young()


def test_parse_young(tmp_path):
    assert parse_young("power:3").r == 3
    pl = parse_young("powerlog:2:-1.5")
    assert (pl.kind, pl.r, pl.delta) == ("power_log", 2.0, -1.5)
    path = tmp_path / "psi.json"
    path.write_text(json.dumps({"t": [0, 1, 2, 3], "psi": [0, 1, 4, 9]}))
    assert parse_young(str(path)).kind == "custom"
    for bad in ("power", "power:x", "cube:3", "missing.json"):
        with pytest.raises(InputError):
            parse_young(bad)


def test_conjugate():
    assert conjugate(2) == 2 and conjugate(1) == math.inf
    assert conjugate(4) == pytest.approx(4 / 3)


# Luxemburg averages ---------------------------------------------------------------

@given(st.integers(0, 10_000), st.floats(1.0, 6.0))
def test_power_case_matches_closed_form(seed, r):
    sp = random_space(seed)
    f = np.random.default_rng(seed).normal(size=sp.n)
    psi = YoungFunction.power(r)
    fam = sp.ball_family()
    got = family_luxemburg(fam, f, psi)
    for b in range(0, len(fam), 7):
        mask = sp.ball_mask(fam.ball(b))
        assert got[b] == pytest.approx(power_average(sp, mask, f, r), rel=1e-8)


def test_constant_function_and_zero(small_random):
    ball = Ball(0, 0.6)
    for psi in PSIS:
        assert orlicz_ball_norm(small_random, ball, np.full(small_random.n, -2.5), psi) == pytest.approx(2.5)
        assert orlicz_ball_norm(small_random, ball, np.zeros(small_random.n), psi) == 0.0
    with pytest.raises(InputError):
        orlicz_ball_norm(small_random, np.zeros(small_random.n, dtype=bool), np.ones(small_random.n), PSIS[0])


@given(st.integers(0, 10_000), st.floats(0.01, 100.0), st.sampled_from(range(len(PSIS))))
def test_homogeneity_and_monotonicity(seed, lam, k):
    sp = random_space(seed, n=10)
    psi = PSIS[k]
    r = np.random.default_rng(seed)
    f = r.normal(size=sp.n)
    g = np.abs(f) + r.random(sp.n)
    ball = Ball(int(r.integers(sp.n)), 0.7)
    nf = orlicz_ball_norm(sp, ball, f, psi)
    assert orlicz_ball_norm(sp, ball, lam * f, psi) == pytest.approx(lam * nf, rel=1e-9)
    assert nf <= orlicz_ball_norm(sp, ball, g, psi) * (1 + 1e-9)


@pytest.mark.parametrize("psi", PSIS, ids=lambda p: p.label)
def test_defining_property(psi, small_random):
    f = np.random.default_rng(2).exponential(size=small_random.n)
    mask = small_random.ball_mask(Ball(3, 0.5))
    lam = orlicz_ball_norm(small_random, mask, f, psi)
    w = small_random.measure[mask]
    avg = np.sum(psi(f[mask] / lam) * w) / w.sum()
    assert 1 - 1e-6 <= avg <= 1.0


def test_orlicz_maximal_power_case(small_random):
    f = np.random.default_rng(3).normal(size=small_random.n)
    got = orlicz_maximal(small_random, f, YoungFunction.power(3))
    want = hardy_littlewood(small_random, np.abs(f) ** 3) ** (1 / 3)
    assert np.allclose(got, want, rtol=1e-8)


def test_orlicz_maximal_brute_force(small_random):
    psi = YoungFunction.power_log(2, 1.5)
    f = np.random.default_rng(4).normal(size=small_random.n)
    want = np.zeros(small_random.n)
    for _, mask in brute_balls(small_random):
        val = orlicz_ball_norm(small_random, mask, f, psi)
        want[mask] = np.maximum(want[mask], val)
    assert np.allclose(orlicz_maximal(small_random, f, psi), want, rtol=1e-9)
    assert np.allclose(orlicz_maximal(small_random, np.full(small_random.n, 3.0), psi), 3.0)


# growth test --------------------------------------------------------------------------

BP_MATRIX = [
    (YoungFunction.power(1), 2, "direct", "finite"),
    (YoungFunction.power(1.5), 2, "direct", "finite"),
    (YoungFunction.power(2), 2.2, "direct", "finite"),
    (YoungFunction.power(2), 2, "direct", "divergent"),
    (YoungFunction.power(1.5), 1.5, "direct", "divergent"),
    (YoungFunction.power(3), 2, "direct", "divergent"),
    (YoungFunction.power_log(2, -1.5), 2, "direct", "finite"),
    (llogl(1.5, 0.5), 3, "dual", "finite"),
    (llogl(2, 0.5), 2, "dual", "finite"),
    (llogl(3, 0.5), 1.5, "dual", "finite"),
    (YoungFunction.power_log(2, 1.5), 2, "dual", "finite"),
    (YoungFunction.power_log(2, 1.0), 2, "dual", "divergent"),
]


@pytest.mark.parametrize("psi,p,form,want", BP_MATRIX,
                         ids=[f"{c[0].label}-p{c[1]}-{c[2]}" for c in BP_MATRIX])
def test_bp_matrix(psi, p, form, want):
    rep = bp_condition_check(psi, p, form=form)
    assert rep.verdict == want
    assert len(rep.ratios) == len(rep.log_increments) - 1


def test_bp_errors():
    psi = YoungFunction.power(2)
    with pytest.raises(ParameterError):
        bp_condition_check(psi, 1.0)
    with pytest.raises(ParameterError):
        bp_condition_check(psi, 2, c=0)
    with pytest.raises(ParameterError):
        bp_condition_check(psi, 2, form="other")


# complementary pairs ----------------------------------------------------------------

def test_power_pair_inverse_product_is_exact():
    lo, hi = inverse_product_bounds(YoungFunction.power(3), YoungFunction.power(1.5))
    assert lo == pytest.approx(1.0, rel=1e-8) and hi == pytest.approx(1.0, rel=1e-8)


def test_numeric_complement_bounds():
    psi = YoungFunction.power_log(2, -2.0)
    lo, hi = inverse_product_bounds(psi, psi.complement())
    assert 1 - 1e-6 <= lo <= hi <= 2 + 1e-6
    # power complement is the conjugate power up to a constant factor
    comp = YoungFunction.power(2).complement()
    s = np.array([0.5, 1.0, 3.0])
    assert np.allclose(comp(s), s ** 2 / 4, rtol=1e-6)


def test_named_power_log_pair_is_equivalent():
    eps, r = 1.0, 2.0
    rc = conjugate(r)
    lo, hi = inverse_product_bounds(YoungFunction.power_log(r, -(1 + eps)),
                                    YoungFunction.power_log(rc, (rc - 1) * (1 + eps)))
    assert 0.25 < lo <= hi < 8


def test_holder_power_pair_and_zero(small_random):
    psi = YoungFunction.power(2).paired(YoungFunction.power(2))
    r = np.random.default_rng(5)
    mask = small_random.ball_mask(Ball(0, 0.8))
    for _ in range(20):
        f, g = r.normal(size=(2, small_random.n))
        lhs, rhs, ratio = generalized_holder_check(small_random, mask, f, g, psi)
        assert ratio <= 1 + 1e-9
    assert generalized_holder_check(small_random, mask, f, np.zeros(small_random.n), psi)[0] == 0.0
    with pytest.raises(ParameterError):
        generalized_holder_check(small_random, mask, f, g, YoungFunction.power(2))


def test_holder_power_log_pair(small_random):
    psi = YoungFunction.power_log(2, -2.0)
    psi = psi.paired(YoungFunction.power_log(2, 2.0))
    r = np.random.default_rng(6)
    worst = 0.0
    for _ in range(100):
        f, g = r.exponential(size=(2, small_random.n)) ** 2
        ball = Ball(int(r.integers(small_random.n)), float(r.uniform(0.2, 1.5)))
        worst = max(worst, generalized_holder_check(small_random, ball, f, g, psi)[2])
    assert worst <= 4
