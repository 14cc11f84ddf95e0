from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import ADV, enumerate_step, power_iteration, tridiagonal
from srmwa.analytic import (
    DegenerateRates,
    ReducibleChain,
    TransitionRates,
    build_rates,
    build_transition_matrix,
    expected_advertised_share,
    gamma_value,
    m1_up_down_ratio,
    stationary,
    transition_down,
    transition_up,
)
from srmwa.model import APPROXIMATION, EXACT_M1, GammaPolicy, ModelParams, PolicyMismatch


def params_(n=100, i=100, m=10, p=0.1, gamma=APPROXIMATION):
    return ModelParams(n, i, m, p, gamma_policy=gamma)


# -- gamma -----------------------------------------------------------------------

def test_gamma_exact_m1():
    assert gamma_value(params_(m=1, gamma=EXACT_M1)) == 0


def test_gamma_approximation():
    assert gamma_value(params_(m=10)) == 0.5
    assert gamma_value(params_(m=90)) == 0.9


def test_gamma_fixed_and_mismatch():
    assert gamma_value(params_(gamma=GammaPolicy.fixed(0.3))) == 0.3
    with pytest.raises(PolicyMismatch):
        gamma_value(params_(m=2, gamma=EXACT_M1))


# -- single rates -------------------------------------------------------------------

def test_up_boundaries():
    p = params_()
    assert transition_up(100, p) == 0
    for params in (params_(p=0.37), params_(n=7, i=9, m=4, p=0.02)):
        assert transition_up(0, params) == pytest.approx(params.pressure, rel=1e-15)
        assert transition_up(0, params, exact=True) == Fraction(params.pressure)


def test_up_hand_value():
    # (50/9900) * ((99 - 50/10) * 0.1 + 50/10) = (50/9900) * 14.4 = 4/55
    assert transition_up(50, params_()) == pytest.approx(4 / 55, rel=1e-14)
    assert transition_up(50, params_(), exact=True) == pytest.approx(Fraction(4, 55), rel=1e-15)


def test_down_hand_value():
    # 50 * 0.9 * 0.5 / 99000 * (50 + 49 * 9 / 10) = 2823/132000
    assert transition_down(50, params_(), 0.5) == pytest.approx(2823 / 132000, rel=1e-14)


def test_down_boundaries():
    assert transition_down(0, params_(), 0.5) == 0
    for i in range(101):
        assert transition_down(i, params_(p=1.0), 0.3) == 0


def test_state_out_of_range():
    with pytest.raises(ValueError):
        transition_up(101, params_())
    with pytest.raises(ValueError):
        transition_down(-1, params_(), 0.5)


# -- rate tables -----------------------------------------------------------------------

def test_zero_pressure_rates_are_pure_recommendation():
    p = params_(n=20, i=30, m=3, p=0.0)
    rates = build_rates(p)
    i = np.arange(21)
    assert np.allclose(rates.up, i * (20 - i) / (20 * 19 * 3), rtol=1e-14, atol=0)
    assert rates.up[0] == 0


def test_full_pressure_rates_drift():
    rates = build_rates(params_(n=10, i=10, m=3, p=1.0))
    assert np.all(rates.down == 0)
    assert np.all(rates.up[:-1] > 0)


def test_small_chain_matches_tree_enumeration():
    params = params_(n=3, i=3, m=1, p=0.5, gamma=EXACT_M1)
    rates = build_rates(params, exact=True)
    # frozen from oracles.enumerate_step over configurations with 0..3 infected agents
    assert list(rates.up) == [Fraction(1, 2), Fraction(1, 2), Fraction(1, 3), 0]
    assert list(rates.down) == [0, Fraction(1, 6), Fraction(1, 6), 0]
    for i in range(4):
        stocks = [{ADV} if k < i else {k} for k in range(3)]
        up, down, stay = enumerate_step(stocks, Fraction(1, 2))
        assert (rates.up[i], rates.down[i], rates.stay[i]) == (up, down, stay)


@given(n=st.integers(2, 5), m=st.integers(1, 3), p=st.fractions(0, 1, max_denominator=20),
       data=st.data())
@settings(max_examples=40, deadline=None)
def test_rates_match_enumeration_on_disjoint_stocks(n, m, p, data):
    """With pairwise-disjoint regular items a recommended item is never owned,
    so the enumeration must reproduce the gamma = 0 rates exactly for any M."""
    i = data.draw(st.integers(0, n))
    stocks, nxt = [], 0
    for k in range(n):
        regular = m - 1 if k < i else m
        stock = set(range(nxt, nxt + regular))
        nxt += regular
        if k < i:
            stock.add(ADV)
        stocks.append(stock)
    params = ModelParams(n, max(nxt, m), m, float(p), gamma_policy=GammaPolicy.fixed(0.0))
    up, down, _ = enumerate_step(stocks, Fraction(float(p)))
    assert transition_up(i, params, exact=True) == up
    assert transition_down(i, params, 0, exact=True) == down


@given(n=st.integers(2, 5), m=st.integers(1, 3), seed=st.integers(0, 10**6), data=st.data())
@settings(max_examples=40, deadline=None)
def test_up_rate_matches_enumeration_on_any_configuration(n, m, seed, data):
    n_items = m + 3
    rng = np.random.default_rng(seed)
    i = data.draw(st.integers(0, n))
    stocks = []
    for k in range(n):
        size = m - 1 if k < i else m
        stock = set(rng.choice(n_items, size=size, replace=False).tolist())
        if k < i:
            stock.add(ADV)
        stocks.append(stock)
    params = ModelParams(n, n_items, m, 0.25)
    up, _, _ = enumerate_step(stocks, Fraction(1, 4))
    assert transition_up(i, params, exact=True) == up


def test_float_rates_agree_with_exact():
    for params in (params_(), params_(n=17, i=40, m=7, p=0.003), params_(m=1, gamma=EXACT_M1)):
        fl, ex = build_rates(params), build_rates(params, exact=True)
        for a, b in ((fl.up, ex.up), (fl.down, ex.down), (fl.stay, ex.stay)):
            assert np.allclose(a, np.array(b, dtype=float), rtol=1e-13, atol=1e-16)


def test_transition_matrix_shape_and_rows():
    rates = build_rates(params_(n=2, i=2, m=1, p=0.3, gamma=EXACT_M1))
    mat = build_transition_matrix(rates)
    assert mat.shape == (3, 3)
    assert np.allclose(mat.sum(axis=1), 1, atol=1e-12)
    assert mat[0, 0] == rates.stay[0] and mat[0, 1] == rates.up[0]
    small = TransitionRates(np.array([0.4, 0.0]), np.array([0.0, 0.25]),
                            np.array([0.6, 0.75]), 0.0)
    assert np.array_equal(build_transition_matrix(small), [[0.6, 0.4], [0.25, 0.75]])


# -- stationary distribution ---------------------------------------------------------------

def test_full_pressure_is_delta_n():
    pi = stationary(build_rates(params_(n=10, i=10, m=2, p=1.0))).pi
    assert list(pi) == [0.0] * 10 + [1.0]
    assert expected_advertised_share(params_(n=10, i=10, m=2, p=1.0)) == 1.0


def test_zero_pressure_is_delta_zero():
    pi = stationary(build_rates(params_(n=10, i=10, m=2, p=0.0))).pi
    assert pi[0] == 1.0 and pi.sum() == 1.0
    assert expected_advertised_share(params_(n=10, i=10, m=2, p=0.0)) == 0.0


def test_gamma_one_drifts_to_top():
    params = params_(n=10, i=10, m=3, p=0.01, gamma=GammaPolicy.fixed(1.0))
    assert expected_advertised_share(params) == 1.0


def test_small_chain_matches_power_iteration():
    rates = build_rates(params_(n=3, i=3, m=1, p=0.5, gamma=EXACT_M1))
    pi = stationary(rates).pi
    oracle = power_iteration(tridiagonal([0.5, 0.5, 1 / 3, 0], [0, 1 / 6, 1 / 6, 0]))
    assert np.allclose(pi, oracle, atol=1e-10, rtol=0)
    assert list(pi) == [0, 0, 0, 1]


def test_scarce_capacity_expected_share_matches_oracle():
    params = params_(n=5, i=5, m=1, p=0.1, gamma=EXACT_M1)
    rates = build_rates(params)
    oracle = power_iteration(tridiagonal(rates.up, rates.down))
    assert float(oracle @ np.arange(6)) / 5 == pytest.approx(1.0, abs=1e-12)
    assert expected_advertised_share(params) == 1.0


def test_detailed_balance_and_normalization():
    for params in (params_(), params_(n=40, i=80, m=20, p=1e-4),
                   params_(n=30, i=30, m=29, p=0.3, gamma=GammaPolicy.fixed(0.2))):
        rates = build_rates(params)
        pi = stationary(rates).pi
        assert abs(pi.sum() - 1) < 1e-12
        assert np.all(pi >= 0)
        assert np.allclose(pi[:-1] * rates.up[:-1], pi[1:] * rates.down[1:], atol=1e-10, rtol=0)


def test_exact_stationary_matches_float():
    params = params_(n=12, i=20, m=4, p=0.05)
    ex = stationary(build_rates(params, exact=True)).pi
    fl = stationary(build_rates(params)).pi
    assert sum(ex) == 1
    assert np.allclose(fl, np.array(ex, dtype=float), atol=1e-14)


def test_large_population_no_overflow():
    # ratios up/down compound far past float range at this size
    params = ModelParams(10_000, 10_000, 50, 0.2)
    pi = stationary(build_rates(params)).pi
    assert np.all(np.isfinite(pi))
    assert abs(pi.sum() - 1) < 1e-12
    assert 0 < expected_advertised_share(params) <= 1


def test_reducible_hand_built_rates_rejected():
    up = np.array([0.2, 0.3, 0.0, 0.2, 0.0])
    down = np.array([0.0, 0.1, 0.1, 0.1, 0.1])
    rates = TransitionRates(up, down, 1 - up - down, 0.5)
    with pytest.raises(ReducibleChain):
        stationary(rates)


def test_bad_boundaries_rejected():
    up = np.array([0.2, 0.3])
    down = np.array([0.1, 0.1])
    with pytest.raises(DegenerateRates):
        stationary(TransitionRates(up, down, 1 - up - down, 0.5))


def test_expected_share_monotone_in_pressure():
    for m, i in ((10, 100), (40, 100), (5, 20)):
        shares = [expected_advertised_share(params_(i=i, m=m, p=p))
                  for p in (1e-4, 1e-3, 1e-2, 1e-1, 1.0)]
        assert shares == sorted(shares)


# -- capacity-one closed form ---------------------------------------------------------------

def test_m1_ratio_examples():
    assert m1_up_down_ratio(1, params_(n=2, i=2, m=1, p=0.5)) == 2.0
    near_zero = m1_up_down_ratio(99, params_(m=1, p=1e-12))
    assert 1 < near_zero < 1 + 1e-9


@given(n=st.integers(2, 200), p=st.floats(1e-6, 1 - 1e-6), data=st.data())
@settings(max_examples=100, deadline=None)
def test_m1_ratio_exceeds_one_and_matches_rates(n, p, data):
    i = data.draw(st.integers(1, n - 1))
    params = params_(n=n, i=n, m=1, p=p, gamma=EXACT_M1)
    ratio = m1_up_down_ratio(i, params)
    assert ratio > 1
    exact = transition_up(i, params, exact=True) / transition_down(i, params, 0, exact=True)
    assert exact == m1_up_down_ratio(i, params, exact=True)


def test_m1_ratio_guards():
    with pytest.raises(PolicyMismatch):
        m1_up_down_ratio(1, params_(m=2))
    with pytest.raises(ValueError):
        m1_up_down_ratio(1, params_(m=1, p=0.0))
    with pytest.raises(ValueError):
        m1_up_down_ratio(100, params_(m=1, p=0.5))

