"""Diagnostic statistics: correlation, ACF, Ljung-Box and ADF."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import (
    ConstantInput,
    InvalidDf,
    LagTooLarge,
    LengthMismatch,
    SingularRegression,
    TooShort,
)


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # not a pytest class

    name: str
    statistic: float
    p_value: float
    df_or_lags: int
    clamped: bool = False
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "clamped": self.clamped,
            "df_or_lags": self.df_or_lags,
            "detail": dict(self.detail),
        }


@dataclass(frozen=True)
class AcfResult:
    lags: np.ndarray
    values: np.ndarray

    def to_dict(self) -> dict:
        return {"lags": self.lags.tolist(), "values": self.values.tolist()}


def _is_constant(x) -> bool:
    return x.size == 0 or x.min() == x.max()


def pearson(x, y) -> float:
    """Product-moment correlation of two equal-length sequences."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise LengthMismatch(f"lengths differ: {x.size} != {y.size}")
    if x.size < 3:
        raise TooShort("pearson needs at least 3 points")
    if _is_constant(x) or _is_constant(y):
        raise ConstantInput("pearson is undefined for a constant input")
    dx = x - x.mean()
    dy = y - y.mean()
    r = np.dot(dx, dy) / math.sqrt(np.dot(dx, dx) * np.dot(dy, dy))
    return float(min(1.0, max(-1.0, r)))


def acf(x, max_lag: int) -> AcfResult:
    """Sample autocorrelations at lags 1..max_lag (biased denominator)."""
    x = np.asarray(x, dtype=float)
    if max_lag >= x.size:
        raise LagTooLarge(f"max_lag {max_lag} must be below the series length {x.size}")
    if max_lag < 1:
        raise LagTooLarge("max_lag must be at least 1")
    if _is_constant(x):
        raise ConstantInput("autocorrelation of a constant series is undefined")
    d = x - x.mean()
    denom = np.dot(d, d)
    values = np.array([np.dot(d[k:], d[:-k]) for k in range(1, max_lag + 1)]) / denom
    return AcfResult(lags=np.arange(1, max_lag + 1), values=values)


def chi_square_sf(q: float, df: int) -> float:
    """Upper-tail chi-square probability ``P(X > q)``, ``X ~ chi2(df)``."""
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    return float(special.gammaincc(df / 2.0, q / 2.0))


def ljung_box(x, lags: int = 10, fit_df: int = 0) -> TestResult:
    """Ljung-Box portmanteau test of zero autocorrelation up to ``lags``.

    ``fit_df`` is subtracted from ``lags`` for the chi-square degrees of
    freedom, as is usual when ``x`` holds residuals of a fitted model.
    """
    if fit_df < 0 or lags <= fit_df:
        raise InvalidDf(f"lags ({lags}) must exceed fit_df ({fit_df})")
    x = np.asarray(x, dtype=float)
    n = x.size
    rho = acf(x, lags).values
    q = float(n * (n + 2) * np.sum(rho**2 / (n - np.arange(1, lags + 1))))
    df = lags - fit_df
    return TestResult(
        name="ljung_box",
        statistic=q,
        p_value=chi_square_sf(q, df),
        df_or_lags=df,
        detail={"lags": lags, "fit_df": fit_df, "n": n},
    )


# Quantiles of the Dickey-Fuller t-statistic with constant and linear trend
# (Fuller 1976; Hamilton 1994, Table B.6 case 4), rows = sample size.
DF_CT_SIZES = np.array([25, 50, 100, 250, 500, 100000], dtype=float)
DF_CT_PROBS = np.array([0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99])
DF_CT_TABLE = -np.array(
    [
        [4.38, 3.95, 3.60, 3.24, 1.14, 0.80, 0.50, 0.15],
        [4.15, 3.80, 3.50, 3.18, 1.19, 0.87, 0.58, 0.24],
        [4.04, 3.73, 3.45, 3.15, 1.22, 0.90, 0.62, 0.28],
        [3.99, 3.69, 3.43, 3.13, 1.23, 0.92, 0.64, 0.31],
        [3.98, 3.68, 3.42, 3.13, 1.24, 0.93, 0.65, 0.32],
        [3.96, 3.66, 3.41, 3.12, 1.25, 0.94, 0.66, 0.33],
    ]
)


def df_critical_values(n: int) -> np.ndarray:
    """Table quantiles linearly interpolated to sample size ``n`` (clamped)."""
    return np.array([np.interp(n, DF_CT_SIZES, DF_CT_TABLE[:, j]) for j in range(DF_CT_PROBS.size)])


def df_pvalue(stat: float, n: int) -> tuple[float, bool]:
    """Interpolated p-value and whether it was clamped at a table edge."""
    quantiles = df_critical_values(n)
    if stat <= quantiles[0]:
        return float(DF_CT_PROBS[0]), True
    if stat >= quantiles[-1]:
        return float(DF_CT_PROBS[-1]), True
    return float(np.interp(stat, quantiles, DF_CT_PROBS)), False


def adf_test(x, lags: int | None = None) -> TestResult:
    """Augmented Dickey-Fuller test with constant and linear trend.

    Regresses ``dx[t]`` on a constant, a time index, ``x[t-1]`` and ``k``
    lagged differences, with ``k = floor((len(x) - 1) ** (1/3))`` unless
    given.  The statistic is the t-ratio of the ``x[t-1]`` coefficient and the
    p-value comes from the embedded Dickey-Fuller table, clamped to
    [0.01, 0.99].
    """
    x = np.asarray(x, dtype=float)
    if x.size < 30:
        raise TooShort(f"ADF needs at least 30 observations, got {x.size}")
    k = int(math.floor((x.size - 1) ** (1.0 / 3.0) + 1e-12)) if lags is None else int(lags)
    dx = np.diff(x)
    n = dx.size
    rows = np.arange(k, n)
    cols = [np.ones(rows.size), rows + 1.0, x[rows]]
    cols += [dx[rows - i] for i in range(1, k + 1)]
    design = np.column_stack(cols)
    response = dx[rows]
    coef, _, rank, _ = np.linalg.lstsq(design, response, rcond=None)
    if rank < design.shape[1]:
        raise SingularRegression("ADF design matrix is rank deficient")
    resid = response - design @ coef
    dof = rows.size - design.shape[1]
    sigma2 = np.dot(resid, resid) / dof
    xtx_inv = np.linalg.inv(design.T @ design)
    se = math.sqrt(sigma2 * xtx_inv[2, 2])
    if se == 0 or not math.isfinite(se):
        raise SingularRegression("zero standard error for the lagged level")
    stat = float(coef[2] / se)
    p, clamped = df_pvalue(stat, n)
    return TestResult(
        name="adf",
        statistic=stat,
        p_value=p,
        df_or_lags=k,
        clamped=clamped,
        detail={"lag_order": k, "n_obs": int(rows.size), "gamma": float(coef[2]), "se_gamma": se},
    )


def simulate_df_quantile(n: int = 500, reps: int = 20000, prob: float = 0.05, seed: int = 0) -> float:
    """Monte-Carlo quantile of the constant+trend Dickey-Fuller t-statistic.

    Simulates driftless Gaussian random walks of length ``n`` and fits the
    un-augmented regression, partialling out constant and trend once for all
    replications.
    """
    rng = np.random.default_rng(seed)
    stats = np.empty(reps)
    t = np.arange(1.0, n)
    trend = np.column_stack([np.ones(n - 1), t])
    proj = trend @ np.linalg.pinv(trend)
    batch = 2000
    for start in range(0, reps, batch):
        size = min(batch, reps - start)
        walks = np.cumsum(rng.standard_normal((size, n)), axis=1)
        dy = np.diff(walks, axis=1)
        lag = walks[:, :-1]
        dy_t = dy - dy @ proj.T
        lag_t = lag - lag @ proj.T
        sxx = np.einsum("ij,ij->i", lag_t, lag_t)
        gamma = np.einsum("ij,ij->i", lag_t, dy_t) / sxx
        resid = dy_t - gamma[:, None] * lag_t
        s2 = np.einsum("ij,ij->i", resid, resid) / (n - 1 - 3)
        stats[start : start + size] = gamma / np.sqrt(s2 / sxx)
    return float(np.quantile(stats, prob))
