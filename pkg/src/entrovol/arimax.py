"""Linear regression with ARIMA errors, fitted by conditional sum of squares.

Model::

    y[t] = mu + beta * x[t] + eta[t]
    (1 - phi_1 B - ... - phi_p B^p) (1 - B)^d eta[t]
        = (1 + theta_1 B + ... + theta_q B^q) e[t]

The intercept ``mu`` is only present when ``d == 0`` (it is differenced away
otherwise).  Innovations are obtained by running the ARMA recursion on the
differenced regression error with zero pre-sample values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, signal
from scipy.stats import norm

from .errors import (
    ConstantInput,
    HorizonZero,
    InvalidDf,
    LengthMismatch,
    NonConvergence,
    SingularFit,
    TooShort,
)
from .stats import TestResult, acf, ljung_box

ROOT_MARGIN = 1e-3
PENALTY_WEIGHT = 1e6


@dataclass(frozen=True)
class ArimaxSpec:
    p: int = 4
    d: int = 1
    q: int = 3
    include_regressor: bool = True

    def __post_init__(self):
        if min(self.p, self.q) < 0:
            raise ValueError("AR and MA orders must be non-negative")
        if self.d not in (0, 1, 2):
            raise ValueError(f"differencing degree must be 0, 1 or 2, got {self.d}")
        if self.p + self.q < 1 and not self.include_regressor:
            raise ValueError("model has no parameters: need p + q >= 1 or a regressor")

    @property
    def has_intercept(self) -> bool:
        return self.d == 0

    @property
    def n_regression(self) -> int:
        return int(self.include_regressor) + int(self.has_intercept)

    @property
    def n_params(self) -> int:
        return self.n_regression + self.p + self.q

    def label(self) -> str:
        return f"ARIMA({self.p},{self.d},{self.q})"


@dataclass(frozen=True)
class PreparedData:
    """Differenced response and regressor columns for the CSS recursion."""

    spec: ArimaxSpec
    yd: np.ndarray
    regressors: np.ndarray  # (n, k): differenced x and/or a constant column

    @property
    def n(self) -> int:
        return self.yd.size


def prepare_data(y, x, spec: ArimaxSpec) -> PreparedData:
    y = np.asarray(y, dtype=float)
    yd = np.diff(y, n=spec.d) if spec.d else y.copy()
    cols = []
    if spec.include_regressor:
        if x is None:
            raise ValueError("the model includes a regressor but x is None")
        x = np.asarray(x, dtype=float)
        if x.shape != y.shape:
            raise LengthMismatch(f"y and x differ in length: {y.size} != {x.size}")
        cols.append(np.diff(x, n=spec.d) if spec.d else x.copy())
    if spec.has_intercept:
        cols.append(np.ones(yd.size))
    regressors = np.column_stack(cols) if cols else np.empty((yd.size, 0))
    return PreparedData(spec=spec, yd=yd, regressors=regressors)


def split_params(params, spec: ArimaxSpec):
    """Packed vector -> (regression coefs, phi, theta)."""
    params = np.asarray(params, dtype=float)
    k = spec.n_regression
    return params[:k], params[k : k + spec.p], params[k + spec.p : k + spec.p + spec.q]


def _min_root_modulus(coefs, sign) -> float:
    """Smallest |root| of 1 + sign*(c_1 z + ... + c_k z^k)."""
    c = np.trim_zeros(np.asarray(coefs, dtype=float), "b")
    if c.size == 0:
        return math.inf
    poly = np.concatenate(([1.0], sign * c))[::-1]
    return float(np.min(np.abs(np.roots(poly))))


def root_penalty(phi, theta) -> float:
    """Smooth quadratic penalty on AR/MA roots inside ``1 + ROOT_MARGIN``."""
    total = 0.0
    for coefs, sign in ((phi, -1.0), (theta, 1.0)):
        c = np.trim_zeros(np.asarray(coefs, dtype=float), "b")
        if c.size == 0:
            continue
        roots = np.abs(np.roots(np.concatenate(([1.0], sign * c))[::-1]))
        short = np.maximum(0.0, 1.0 + ROOT_MARGIN - roots)
        total += float(np.sum(short**2))
    return total


def _filter(phi, theta, v):
    a = np.concatenate(([1.0], -np.asarray(phi, dtype=float)))
    b = np.concatenate(([1.0], np.asarray(theta, dtype=float)))
    return signal.lfilter(a, b, v, axis=0)


def innovations(params, data: PreparedData) -> np.ndarray:
    """One-step innovations of the differenced regression error."""
    coefs, phi, theta = split_params(params, data.spec)
    w = data.yd - data.regressors @ coefs
    return _filter(phi, theta, w)


def css_objective(params, data: PreparedData, penalize: bool = True) -> float:
    """Conditional sum of squared innovations plus the unit-root penalty.

    The penalty is scaled by the sum of squares of the differenced response
    so that it is commensurate with the CSS term.
    """
    e = innovations(params, data)
    css = float(np.dot(e, e))
    if not penalize:
        return css
    _, phi, theta = split_params(params, data.spec)
    pen = root_penalty(phi, theta)
    if pen:
        css += PENALTY_WEIGHT * pen * float(np.dot(data.yd, data.yd))
    return css


def _concentrated(arma, data: PreparedData):
    """Best regression coefficients and CSS for fixed ARMA coefficients."""
    p = data.spec.p
    phi, theta = arma[:p], arma[p:]
    fy = _filter(phi, theta, data.yd)
    if data.regressors.shape[1]:
        fz = _filter(phi, theta, data.regressors)
        coefs, *_ = np.linalg.lstsq(fz, fy, rcond=None)
        e = fy - fz @ coefs
    else:
        coefs = np.empty(0)
        e = fy
    return coefs, float(np.dot(e, e))


def _shrink_to_valid(phi, theta):
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    for _ in range(200):
        if _min_root_modulus(phi, -1.0) > 1.05 and _min_root_modulus(theta, 1.0) > 1.05:
            break
        phi = phi * 0.9
        theta = theta * 0.9
    return phi, theta


def hannan_rissanen(w, p: int, q: int):
    """Rough ARMA seeds: long AR for innovations, then one regression."""
    n = w.size
    if p + q == 0:
        return np.empty(0), np.empty(0)
    long = int(min(max(2 * (p + q), 10), max(1, n // 10)))
    lagged = np.column_stack([w[long - i : n - i] for i in range(1, long + 1)])
    ar_long, *_ = np.linalg.lstsq(lagged, w[long:], rcond=None)
    ehat = np.zeros(n)
    ehat[long:] = w[long:] - lagged @ ar_long
    start = long + max(p, q)
    cols = [w[start - i : n - i] for i in range(1, p + 1)]
    cols += [ehat[start - j : n - j] for j in range(1, q + 1)]
    coef, *_ = np.linalg.lstsq(np.column_stack(cols), w[start:], rcond=None)
    return _shrink_to_valid(coef[:p], coef[p:])


@dataclass
class ArimaxFit:
    spec: ArimaxSpec
    beta: float
    intercept: float
    phi: np.ndarray
    theta: np.ndarray
    sigma2: float
    residuals: np.ndarray
    residual_dates: np.ndarray
    css: float
    loglik: float
    aic: float
    aicc: float
    bic: float
    se: dict
    n_obs: int
    optimizer: dict = field(default_factory=dict)
    # data needed to forecast
    y: np.ndarray = field(default=None, repr=False)
    x: np.ndarray = field(default=None, repr=False)
    dates: np.ndarray = field(default=None, repr=False)

    @property
    def params(self) -> np.ndarray:
        coefs = []
        if self.spec.include_regressor:
            coefs.append(self.beta)
        if self.spec.has_intercept:
            coefs.append(self.intercept)
        return np.concatenate((coefs, self.phi, self.theta))

    def summary_dict(self) -> dict:
        return {
            "model": f"regression with {self.spec.label()} errors",
            "order": [self.spec.p, self.spec.d, self.spec.q],
            "include_regressor": self.spec.include_regressor,
            "beta": self.beta,
            "intercept": self.intercept,
            "phi": self.phi.tolist(),
            "theta": self.theta.tolist(),
            "sigma2": self.sigma2,
            "css": self.css,
            "loglik": self.loglik,
            "aic": self.aic,
            "aicc": self.aicc,
            "bic": self.bic,
            "se": dict(self.se),
            "n_obs": self.n_obs,
            "estimation": "conditional sum of squares, Nelder-Mead multi-start",
            "optimizer": dict(self.optimizer),
        }


def _param_names(spec: ArimaxSpec):
    names = []
    if spec.include_regressor:
        names.append("xreg")
    if spec.has_intercept:
        names.append("intercept")
    names += [f"ar{i}" for i in range(1, spec.p + 1)]
    names += [f"ma{j}" for j in range(1, spec.q + 1)]
    return names


def _hessian(f, x0, steps):
    k = x0.size
    h = np.empty((k, k))
    f0 = f(x0)
    for i in range(k):
        ei = np.zeros(k)
        ei[i] = steps[i]
        h[i, i] = (f(x0 + ei) - 2.0 * f0 + f(x0 - ei)) / steps[i] ** 2
        for j in range(i):
            ej = np.zeros(k)
            ej[j] = steps[j]
            h[i, j] = h[j, i] = (
                f(x0 + ei + ej) - f(x0 + ei - ej) - f(x0 - ei + ej) + f(x0 - ei - ej)
            ) / (4.0 * steps[i] * steps[j])
    return h


def _standard_errors(params, data, scales):
    n = data.n

    def nll(theta):
        css = css_objective(theta, data, penalize=False)
        return 0.5 * n * math.log(css) if css > 0 else -1e300

    steps = 1e-4 * np.maximum(np.abs(params), scales)
    try:
        cov = np.linalg.inv(_hessian(nll, params, steps))
        var = np.diag(cov)
    except np.linalg.LinAlgError:
        var = np.full(params.size, np.nan)
    return np.where(var > 0, np.sqrt(np.abs(var)), np.nan)


def _nelder_mead(fun, x0, max_iter):
    k = x0.size
    simplex = np.vstack([x0] + [x0 + 0.1 * np.eye(k)[i] for i in range(k)])
    return optimize.minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": 1e-7,
            "fatol": 1e-12,
            "maxiter": max_iter,
            "maxfev": 2 * max_iter,
            "adaptive": True,
        },
    )


def fit_regression_arima_errors(
    y,
    x=None,
    spec: ArimaxSpec = ArimaxSpec(),
    dates=None,
    seed: int = 20230410,
    n_jitter: int = 3,
    max_iter: int | None = None,
) -> ArimaxFit:
    """Fit ``y = beta * x + eta`` with ARIMA(p, d, q) errors by CSS.

    For fixed ARMA coefficients the CSS is a linear least-squares problem in
    the regression coefficients, so they are profiled out exactly and
    Nelder-Mead searches only the AR and MA coefficients.  Starts: zeros,
    Hannan-Rissanen seeds from the OLS regression error, and ``n_jitter``
    seeded perturbations of those.  The lowest objective wins, ties going to
    the earlier start.
    """
    y = np.asarray(y, dtype=float)
    n_total = y.size
    if n_total <= 10 * (spec.p + spec.q + 2):
        raise TooShort(f"{spec.label()} needs more than {10 * (spec.p + spec.q + 2)} points, got {n_total}")
    if x is not None and np.asarray(x).size != n_total:
        raise LengthMismatch("y and x differ in length")
    data = prepare_data(y, x, spec)
    if data.regressors.shape[1] and np.linalg.matrix_rank(data.regressors) < data.regressors.shape[1]:
        raise SingularFit("regressor is constant after differencing")
    n = data.n
    scale = float(np.dot(data.yd, data.yd)) or 1.0
    n_arma = spec.p + spec.q
    max_iter = max_iter or 4000 * max(n_arma, 1)

    def objective(arma):
        pen = root_penalty(arma[: spec.p], arma[spec.p :])
        with np.errstate(all="ignore"):
            _, css = _concentrated(arma, data)
        if not math.isfinite(css):
            return 1e10 + PENALTY_WEIGHT * pen
        return css / scale + PENALTY_WEIGHT * pen

    runs = []
    if n_arma:
        coefs0, _ = _concentrated(np.zeros(n_arma), data)
        w0 = data.yd - data.regressors @ coefs0
        phi0, theta0 = hannan_rissanen(w0, spec.p, spec.q)
        hr = np.concatenate((phi0, theta0))
        rng = np.random.default_rng(seed)
        starts = [np.zeros(n_arma), hr]
        for _ in range(n_jitter):
            jitter = hr + rng.normal(0.0, 0.1, n_arma)
            starts.append(np.concatenate(_shrink_to_valid(jitter[: spec.p], jitter[spec.p :])))
        for k, s in enumerate(starts):
            res = _nelder_mead(objective, s, max_iter)
            runs.append((float(res.fun), k, res))
        best_fun, best_k, best = min(runs, key=lambda t: (t[0], t[1]))
        # polish from the winner; a converged polish is required
        polish = _nelder_mead(objective, best.x, max_iter)
        if not polish.success:
            raise NonConvergence(f"Nelder-Mead did not converge within {max_iter} iterations: {polish.message}")
        arma = polish.x if polish.fun <= best_fun else best.x
        coefs, _ = _concentrated(arma, data)
        opt_info = {
            "starts": len(starts),
            "best_start": best_k,
            "start_objectives": [r[0] for r in runs],
            "iterations": int(sum(r[2].nit for r in runs) + polish.nit),
            "seed": seed,
        }
    else:
        arma = np.empty(0)
        coefs, _ = _concentrated(arma, data)
        opt_info = {"starts": 0, "method": "closed-form least squares"}

    params = np.concatenate((coefs, arma))
    e = innovations(params, data)
    css = float(np.dot(e, e))
    if css <= 0:
        raise SingularFit("zero residual sum of squares")
    sigma2 = css / n
    loglik = -0.5 * n * (math.log(2.0 * math.pi * sigma2) + 1.0)
    k = spec.n_params + 1
    aic = -2.0 * loglik + 2.0 * k
    aicc = aic + 2.0 * k * (k + 1) / (n - k - 1) if n - k - 1 > 0 else math.inf
    bic = -2.0 * loglik + k * math.log(n)

    scales = np.ones(params.size)
    if spec.include_regressor:
        scales[0] = max(abs(coefs[0]), float(np.std(data.yd)) / max(float(np.std(data.regressors[:, 0])), 1e-300))
    se = _standard_errors(params, data, scales)

    reg, phi, theta = split_params(params, spec)
    beta = float(reg[0]) if spec.include_regressor else 0.0
    intercept = float(reg[-1]) if spec.has_intercept else 0.0
    if dates is None:
        dates = np.arange(n_total)
    dates = np.asarray(dates)
    return ArimaxFit(
        spec=spec,
        beta=beta,
        intercept=intercept,
        phi=phi.copy(),
        theta=theta.copy(),
        sigma2=sigma2,
        residuals=e,
        residual_dates=dates[spec.d :],
        css=css,
        loglik=loglik,
        aic=aic,
        aicc=aicc,
        bic=bic,
        se=dict(zip(_param_names(spec), (float(s) for s in se))),
        n_obs=n,
        optimizer=opt_info,
        y=y,
        x=None if x is None else np.asarray(x, dtype=float),
        dates=dates,
    )


def select_order(y, x=None, max_p=5, max_q=5, max_d=1, dates=None, seed=20230410):
    """Grid search over (p, d, q) minimising AICc; returns (best_fit, table)."""
    table = []
    best = None
    for d in range(max_d + 1):
        for p in range(max_p + 1):
            for q in range(max_q + 1):
                if p + q == 0 and x is None:
                    continue
                spec = ArimaxSpec(p, d, q, include_regressor=x is not None)
                try:
                    fit = fit_regression_arima_errors(y, x, spec, dates=dates, seed=seed)
                except (NonConvergence, SingularFit, TooShort):
                    continue
                table.append(((p, d, q), fit.aicc))
                if best is None or fit.aicc < best.aicc:
                    best = fit
    if best is None:
        raise NonConvergence("no candidate order could be fitted")
    return best, table


def psi_weights(phi, theta, d: int, horizon: int) -> np.ndarray:
    """MA(infinity) weights of the ARIMA error process, psi_0 = 1."""
    ar = np.concatenate(([1.0], -np.asarray(phi, dtype=float)))
    for _ in range(d):
        ar = np.convolve(ar, [1.0, -1.0])
    ar_star = -ar[1:]  # (1 - sum ar_star_i B^i)
    psi = np.zeros(horizon)
    psi[0] = 1.0
    for j in range(1, horizon):
        acc = theta[j - 1] if j - 1 < len(theta) else 0.0
        for i in range(1, min(j, ar_star.size) + 1):
            acc += ar_star[i - 1] * psi[j - i]
        psi[j] = acc
    return psi


@dataclass(frozen=True)
class ForecastResult:
    horizon: int
    point: np.ndarray
    lower80: np.ndarray
    upper80: np.ndarray
    lower95: np.ndarray
    upper95: np.ndarray
    assumed_regressor: np.ndarray
    std_error: np.ndarray

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "point": self.point.tolist(),
            "lower80": self.lower80.tolist(),
            "upper80": self.upper80.tolist(),
            "lower95": self.lower95.tolist(),
            "upper95": self.upper95.tolist(),
            "assumed_regressor": self.assumed_regressor.tolist(),
            "regressor_uncertainty": "ignored (future regressor treated as known)",
        }


HOLD_AT_MEAN = "hold_at_mean"


def forecast(fit: ArimaxFit, horizon: int, future_x=HOLD_AT_MEAN) -> ForecastResult:
    """Forecast ``horizon`` steps ahead with 80% and 95% Gaussian bands.

    ``future_x`` is an explicit sequence or `HOLD_AT_MEAN`, which holds the
    regressor at its historical mean.  Intervals ignore uncertainty in both
    the parameters and the future regressor.
    """
    if horizon < 1:
        raise HorizonZero("forecast horizon must be at least 1")
    spec = fit.spec
    if spec.include_regressor:
        if isinstance(future_x, str) and future_x == HOLD_AT_MEAN:
            xf = np.full(horizon, float(np.mean(fit.x)))
        else:
            xf = np.asarray(future_x, dtype=float)
            if xf.size != horizon:
                raise LengthMismatch(f"future_x has {xf.size} values for horizon {horizon}")
        eta = fit.y - fit.beta * fit.x - fit.intercept
    else:
        xf = np.zeros(horizon)
        eta = fit.y - fit.intercept

    # difference levels: levels[k] = k-th difference of eta
    levels = [eta]
    for _ in range(spec.d):
        levels.append(np.diff(levels[-1]))
    w_hist = levels[-1]
    e_hist = fit.residuals
    p, q = spec.p, spec.q
    w_ext = np.concatenate((w_hist, np.zeros(horizon)))
    e_ext = np.concatenate((e_hist, np.zeros(horizon)))
    n = w_hist.size
    for h in range(horizon):
        t = n + h
        acc = 0.0
        for i in range(1, p + 1):
            if t - i >= 0:
                acc += fit.phi[i - 1] * w_ext[t - i]
        for j in range(1, q + 1):
            if t - j >= 0:
                acc += fit.theta[j - 1] * e_ext[t - j]
        w_ext[t] = acc
    future = w_ext[n:]
    for k in range(spec.d - 1, -1, -1):
        future = levels[k][-1] + np.cumsum(future)
    point = fit.intercept + fit.beta * xf + future

    psi = psi_weights(fit.phi, fit.theta, spec.d, horizon)
    std_error = np.sqrt(fit.sigma2 * np.cumsum(psi**2))
    z80, z95 = norm.ppf(0.90), norm.ppf(0.975)
    return ForecastResult(
        horizon=horizon,
        point=point,
        lower80=point - z80 * std_error,
        upper80=point + z80 * std_error,
        lower95=point - z95 * std_error,
        upper95=point + z95 * std_error,
        assumed_regressor=xf,
        std_error=std_error,
    )


@dataclass(frozen=True)
class ResidualDiagnostics:
    ljung_box: TestResult | None
    acf: object  # AcfResult or None
    hist_counts: np.ndarray
    hist_edges: np.ndarray
    degenerate: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "ljung_box": None if self.ljung_box is None else self.ljung_box.to_dict(),
            "acf": None if self.acf is None else self.acf.to_dict(),
            "histogram": {"counts": self.hist_counts.tolist(), "edges": self.hist_edges.tolist()},
            "degenerate": self.degenerate,
            "note": self.note,
        }


def residual_diagnostics(fit_or_residuals, lags: int = 10, fit_df: int | None = None) -> ResidualDiagnostics:
    """Ljung-Box, ACF and a Freedman-Diaconis histogram of fit residuals.

    ``fit_df`` defaults to ``p + q``.  A constant residual vector yields a
    report flagged ``degenerate`` instead of an exception.
    """
    if isinstance(fit_or_residuals, ArimaxFit):
        resid = fit_or_residuals.residuals
        if fit_df is None:
            fit_df = fit_or_residuals.spec.p + fit_or_residuals.spec.q
    else:
        resid = np.asarray(fit_or_residuals, dtype=float)
        fit_df = fit_df or 0
    if lags <= fit_df:
        raise InvalidDf(f"lags ({lags}) must exceed the model df ({fit_df})")
    counts, edges = np.histogram(resid, bins="fd")
    try:
        lb = ljung_box(resid, lags=lags, fit_df=fit_df)
        ac = acf(resid, min(max(lags, 30), resid.size - 1))
    except ConstantInput:
        return ResidualDiagnostics(None, None, counts, edges, degenerate=True, note="residuals are constant")
    return ResidualDiagnostics(lb, ac, counts, edges)
