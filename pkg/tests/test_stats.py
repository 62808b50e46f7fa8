import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy import stats as sps

from entrovol.errors import ConstantInput, InvalidDf, LagTooLarge, LengthMismatch, TooShort
from entrovol.stats import (
    DF_CT_PROBS,
    acf,
    adf_test,
    chi_square_sf,
    df_critical_values,
    df_pvalue,
    ljung_box,
    pearson,
    simulate_df_quantile,
)


def chi2_sf_quadrature(q, df):
    """Upper tail by integrating the density after substituting x = u**2.

    The substitution removes the df = 1 singularity at the origin.
    """
    log_norm = (df / 2.0) * math.log(2.0) + math.lgamma(df / 2.0)

    def integrand(u):
        return 2.0 * u ** (df - 1) * math.exp(-0.5 * u * u - log_norm)

    value, _ = integrate.quad(integrand, math.sqrt(q), np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
    return value


@pytest.mark.parametrize("df", [1, 3, 10])
def test_chi_square_sf_vs_quadrature(df):
    for q in np.linspace(0.0, 50.0, 101):
        assert abs(chi_square_sf(float(q), df) - chi2_sf_quadrature(float(q), df)) < 1e-8


def test_chi_square_sf_examples():
    assert chi_square_sf(0.0, 4) == 1.0
    assert abs(chi_square_sf(35.161, 3) - 1.127e-07) < 1e-9


@pytest.mark.parametrize("df", [1, 3, 10])
def test_chi_square_sf_strictly_decreasing(df):
    values = [chi_square_sf(q, df) for q in np.linspace(0, 60, 200)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_chi_square_sf_bad_input():
    with pytest.raises(ValueError):
        chi_square_sf(-1.0, 2)
    with pytest.raises(ValueError):
        chi_square_sf(1.0, 0)


def test_pearson_examples(rng):
    x = rng.normal(size=50)
    assert pearson(x, 2 * x + 1) == pytest.approx(1.0, abs=1e-14)
    assert pearson(x, -x) == pytest.approx(-1.0, abs=1e-14)


def test_pearson_errors():
    with pytest.raises(LengthMismatch):
        pearson([1, 2, 3], [1, 2])
    with pytest.raises(ConstantInput):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(TooShort):
        pearson([1, 2], [2, 1])


@settings(max_examples=100, deadline=None)
@given(
    st.integers(0, 10_000),
    st.floats(0.01, 100),
    st.floats(-100, 100),
)
def test_pearson_symmetry_and_affine(seed, a, b):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=30), rng.normal(size=30)
    r = pearson(x, y)
    assert -1.0 <= r <= 1.0
    assert pearson(y, x) == pytest.approx(r, abs=1e-12)
    assert pearson(a * x + b, y) == pytest.approx(r, abs=1e-9)
    assert pearson(-a * x + b, y) == pytest.approx(-r, abs=1e-9)


def test_acf_alternating_small_n():
    # [1,2]*5: deviations alternate -+0.5, lag-1 products are all -0.25, 9 of them over 10 * 0.25
    assert acf([1.0, 2.0] * 5, 1).values[0] == pytest.approx(-0.9, abs=1e-15)


def test_acf_white_noise_band(rng):
    n = 10_000
    rho = acf(rng.normal(size=n), 20).values
    assert np.mean(np.abs(rho) < 3 / math.sqrt(n)) >= 0.95
    assert np.all(np.abs(rho) <= 1)


def test_acf_errors():
    with pytest.raises(ConstantInput):
        acf([2.0] * 10, 3)
    with pytest.raises(LagTooLarge):
        acf([1.0, 2.0, 3.0], 3)


def test_ljung_box_residual_tail_value():
    # residual check at 10 lags with 7 fitted ARMA parameters
    assert abs(chi_square_sf(35.161, 10 - 7) - 1.127e-07) < 1e-9


def test_ljung_box_zero_acf():
    # only lag n-1 pairs the two nonzero points, so lags 1..10 have zero ACF
    x = np.zeros(12)
    x[0], x[-1] = 1.0, -1.0
    res = ljung_box(x, lags=10)
    assert res.statistic == 0.0
    assert res.p_value == 1.0


def test_ljung_box_invalid_df(rng):
    with pytest.raises(InvalidDf):
        ljung_box(rng.normal(size=50), lags=7, fit_df=7)


def test_ljung_box_q_monotone_in_lags(rng):
    x = rng.normal(size=300)
    qs = [ljung_box(x, lags=h).statistic for h in range(1, 30)]
    assert qs[0] >= 0
    assert all(b >= a for a, b in zip(qs, qs[1:]))


@pytest.mark.slow
def test_ljung_box_pvalues_uniform_under_null():
    rng = np.random.default_rng(2024)
    p = [ljung_box(rng.normal(size=5000), lags=10).p_value for _ in range(500)]
    assert sps.kstest(p, "uniform").pvalue > 0.01


def test_df_table_monotone_and_pvalue_clamps():
    for n in (25, 60, 500, 9000):
        q = df_critical_values(n)
        assert np.all(np.diff(q) > 0)
    assert df_pvalue(-10.0, 500) == (0.01, True)
    assert df_pvalue(5.0, 500) == (0.99, True)
    p, clamped = df_pvalue(-3.42, 500)
    assert not clamped and p == pytest.approx(0.05, abs=1e-12)
    assert DF_CT_PROBS[0] == 0.01 and DF_CT_PROBS[-1] == 0.99


def test_df_critical_value_monte_carlo():
    table = np.interp(0.05, DF_CT_PROBS, df_critical_values(500))
    assert abs(simulate_df_quantile(n=500, reps=20000, prob=0.05, seed=0) - table) <= 0.1


@pytest.mark.slow
def test_adf_random_walk_vs_white_noise():
    rng = np.random.default_rng(99)
    reps, n = 200, 2000
    walk_keeps = sum(adf_test(np.cumsum(rng.normal(size=n))).p_value > 0.05 for _ in range(reps))
    noise_rejects = sum(adf_test(rng.normal(size=n)).p_value < 0.05 for _ in range(reps))
    assert walk_keeps >= 0.9 * reps
    assert noise_rejects >= 0.9 * reps


def test_adf_lag_order_default(rng):
    res = adf_test(rng.normal(size=1001))
    assert res.df_or_lags == 10
    assert 0.0 <= res.p_value <= 1.0
    assert res.clamped  # strongly stationary noise runs off the table


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1000), st.floats(-50, 50).filter(lambda a: abs(a) > 1e-3), st.floats(-1e3, 1e3))
def test_adf_affine_invariance(seed, a, b):
    x = np.cumsum(np.random.default_rng(seed).normal(size=200))
    base = adf_test(x).statistic
    assert adf_test(a * x + b).statistic == pytest.approx(base, abs=1e-8)


def test_adf_too_short():
    with pytest.raises(TooShort):
        adf_test(np.arange(29.0))
