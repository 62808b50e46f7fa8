"""Cross-checks against statsmodels and scikit-learn when they are installed."""

import numpy as np
import pytest

from entrovol.ml import SupervisedSet, fit_knn, fit_svr
from entrovol.stats import acf, adf_test, ljung_box


@pytest.fixture
def series():
    rng = np.random.default_rng(17)
    return np.cumsum(rng.normal(size=800)) * 0.1 + rng.normal(size=800)


def test_adf_statistic_matches_statsmodels(series):
    tsa = pytest.importorskip("statsmodels.tsa.stattools")
    for x in (series, np.cumsum(series)):
        ours = adf_test(x)
        theirs = tsa.adfuller(x, maxlag=ours.df_or_lags, regression="ct", autolag=None)
        assert ours.statistic == pytest.approx(theirs[0], abs=1e-8)


def test_acf_and_ljung_box_match_statsmodels(series):
    tsa = pytest.importorskip("statsmodels.tsa.stattools")
    diag = pytest.importorskip("statsmodels.stats.diagnostic")
    np.testing.assert_allclose(acf(series, 20).values, tsa.acf(series, nlags=20, fft=False)[1:], atol=1e-12)
    resid = np.diff(series)
    theirs = diag.acorr_ljungbox(resid, lags=[10], model_df=7)
    ours = ljung_box(resid, lags=10, fit_df=7)
    assert ours.statistic == pytest.approx(float(theirs["lb_stat"].iloc[0]), rel=1e-12)
    assert ours.p_value == pytest.approx(float(theirs["lb_pvalue"].iloc[0]), rel=1e-9)


def supervised(rng, n):
    x = rng.uniform(0.5, 2.5, n)
    y = 0.02 * np.exp(-x) + rng.normal(0, 0.001, n)
    return SupervisedSet(x, y, np.arange(n).astype("datetime64[D]"))


def test_svr_matches_libsvm():
    svm = pytest.importorskip("sklearn.svm")
    rng = np.random.default_rng(23)
    train = supervised(rng, 600)
    model = fit_svr(train, tol=1e-6)
    xs = model.x_scaler.transform(train.x)[:, None]
    zs = model.y_scaler.transform(train.y)
    ref = svm.SVR(C=1.0, epsilon=0.1, gamma=1.0, tol=1e-6).fit(xs, zs)
    grid = np.linspace(train.x.min(), train.x.max(), 101)
    ours = model.predict_standardized(model.x_scaler.transform(grid))
    theirs = ref.predict(model.x_scaler.transform(grid)[:, None])
    assert np.max(np.abs(ours - theirs)) <= 1e-4


def test_knn_matches_sklearn():
    neighbors = pytest.importorskip("sklearn.neighbors")
    rng = np.random.default_rng(29)
    train = supervised(rng, 500)
    model = fit_knn(train, k=5)
    ref = neighbors.KNeighborsRegressor(n_neighbors=5).fit(model.scaler.transform(train.x)[:, None], train.y)
    query = rng.uniform(0.4, 2.6, 200)
    np.testing.assert_allclose(model.predict(query), ref.predict(model.scaler.transform(query)[:, None]), rtol=1e-12)
