"""Chronological split, three one-feature regressors, and error metrics.

The regressors predict rolling volatility from rolling sample entropy:

* ordinary least squares,
* epsilon-SVR with an RBF kernel, solved by SMO (second-order working set
  selection, as in LIBSVM),
* k-nearest-neighbour averaging.

Features (and, for the SVR, the target) are standardised with statistics
fitted on the training set only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConstantFeature,
    InvalidHyperparameter,
    InvalidK,
    LengthMismatch,
    NonConvergence,
    TooShort,
    ZeroActualForMape,
)

TAU = 1e-12


@dataclass(frozen=True)
class SupervisedSet:
    x: np.ndarray
    y: np.ndarray
    dates: np.ndarray

    def __post_init__(self):
        if not (len(self.x) == len(self.y) == len(self.dates)):
            raise LengthMismatch("x, y and dates must have equal lengths")
        if len(self.dates) > 1 and np.any(np.diff(self.dates) <= np.timedelta64(0, "D")):
            raise ValueError("dates must be strictly increasing")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise ValueError("x and y must be finite (filter undefined windows first)")

    def __len__(self):
        return len(self.x)

    def subset(self, sl) -> "SupervisedSet":
        return SupervisedSet(self.x[sl], self.y[sl], self.dates[sl])


def align_rolling(feature, target):
    """Join two rolling series on date, dropping undefined windows.

    Returns the `SupervisedSet` and the number of dropped windows.
    """
    f_dates, f_vals = feature.dates, feature.values
    t_dates, t_vals = target.dates, target.values
    f_ok = getattr(feature, "defined", np.isfinite(f_vals))
    t_ok = getattr(target, "defined", np.isfinite(t_vals))
    common, fi, ti = np.intersect1d(f_dates, t_dates, assume_unique=True, return_indices=True)
    keep = f_ok[fi] & t_ok[ti]
    dropped = int(len(common) - np.count_nonzero(keep))
    return SupervisedSet(
        x=np.asarray(f_vals[fi][keep], dtype=float),
        y=np.asarray(t_vals[ti][keep], dtype=float),
        dates=common[keep],
    ), dropped


@dataclass(frozen=True)
class ChronoSplit:
    train: SupervisedSet
    test: SupervisedSet
    ratio: float


def chrono_split(data: SupervisedSet, ratio: float = 0.8) -> ChronoSplit:
    """First ``floor(ratio * n)`` points train, the rest test; no shuffling."""
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    n = len(data)
    if n < 10:
        raise TooShort(f"need at least 10 points to split, got {n}")
    n_train = math.floor(ratio * n + 1e-9)
    return ChronoSplit(data.subset(slice(0, n_train)), data.subset(slice(n_train, n)), ratio)


@dataclass(frozen=True)
class Scaler:
    mean: float
    std: float

    @classmethod
    def fit(cls, values) -> "Scaler":
        values = np.asarray(values, dtype=float)
        std = float(np.std(values))
        if not std > 0:
            raise ConstantFeature("cannot standardise a constant variable")
        return cls(float(np.mean(values)), std)

    def transform(self, values):
        return (np.asarray(values, dtype=float) - self.mean) / self.std

    def inverse(self, values):
        return np.asarray(values, dtype=float) * self.std + self.mean


# --- ordinary least squares -------------------------------------------------


@dataclass(frozen=True)
class LinearPredictor:
    slope: float
    intercept: float

    def predict(self, x):
        return self.intercept + self.slope * np.asarray(x, dtype=float)


def fit_ols(train: SupervisedSet) -> LinearPredictor:
    x = np.asarray(train.x, dtype=float)
    y = np.asarray(train.y, dtype=float)
    if x.size < 2 or x.min() == x.max():
        raise ConstantFeature("OLS needs a non-constant feature")
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    slope = float(np.dot(dx, y - ym) / np.dot(dx, dx))
    return LinearPredictor(slope=slope, intercept=float(ym - slope * xm))


# --- epsilon-SVR via SMO ------------------------------------------------------


def rbf_kernel(u, v, gamma: float):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.exp(-gamma * (u[:, None] - v[None, :]) ** 2)


@dataclass
class SVRSolution:
    """Dual solution of the epsilon-SVR problem in standardised units."""

    alpha: np.ndarray  # multipliers of the upper tube constraint
    alpha_star: np.ndarray  # multipliers of the lower tube constraint
    bias: float
    iterations: int
    kkt_gap: float


def smo_svr(x, z, c: float, epsilon: float, gamma: float, tol: float = 1e-3, max_iter: int = 1_000_000) -> SVRSolution:
    """Solve the epsilon-SVR dual with an RBF kernel by SMO.

    The 2l-variable form ``min 1/2 a'Qa + p'a`` s.t. ``y'a = 0``,
    ``0 <= a <= c`` is used, with ``a = [alpha, alpha*]``, ``y = [+1, -1]``,
    ``p = [eps - z, eps + z]``.  Iterates until the maximal KKT violation
    ``m(a) - M(a)`` drops below ``tol``.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    l = x.size
    sign = np.concatenate((np.ones(l), -np.ones(l)))
    a = np.zeros(2 * l)
    grad = np.concatenate((epsilon - z, epsilon + z))
    idx = np.arange(2 * l) % l
    cache: dict[int, np.ndarray] = {}

    def krow(i):
        row = cache.get(i)
        if row is None:
            if len(cache) > 4096:
                cache.clear()
            row = np.exp(-gamma * (x - x[i]) ** 2)
            cache[i] = row
        return row

    it = 0
    gap = math.inf
    while True:
        at_upper = a >= c
        at_lower = a <= 0
        # I_up: can move along +y; I_low: can move along -y
        up = np.where(sign > 0, ~at_upper, ~at_lower)
        low = np.where(sign > 0, ~at_lower, ~at_upper)
        score = -sign * grad
        up_scores = np.where(up, score, -np.inf)
        i = int(np.argmax(up_scores))
        g_max = up_scores[i]
        low_scores = np.where(low, score, np.inf)
        g_min = float(np.min(low_scores))
        gap = g_max - g_min
        if gap < tol:
            break
        if it >= max_iter:
            raise NonConvergence(f"SMO hit the iteration cap ({max_iter}) with KKT gap {gap:.3g}")
        ki = krow(idx[i])
        k_it = ki[idx]
        # Q_ii = Q_tt = 1 for the RBF kernel
        quad = 2.0 - 2.0 * k_it
        quad = np.where(quad > 0, quad, TAU)
        b = g_max - score
        cand = low & (score < g_max)
        obj = np.where(cand, -(b * b) / quad, np.inf)
        j = int(np.argmin(obj))
        it += 1

        kj = krow(idx[j])
        q_ij = sign[i] * sign[j] * ki[idx[j]]
        old_ai, old_aj = a[i], a[j]
        if sign[i] != sign[j]:
            qc = 2.0 + 2.0 * q_ij
            qc = qc if qc > 0 else TAU
            delta = (-grad[i] - grad[j]) / qc
            diff = a[i] - a[j]
            a[i] += delta
            a[j] += delta
            if diff > 0:
                if a[j] < 0:
                    a[j] = 0.0
                    a[i] = diff
            elif a[i] < 0:
                a[i] = 0.0
                a[j] = -diff
            if diff > 0:
                if a[i] > c:
                    a[i] = c
                    a[j] = c - diff
            elif a[j] > c:
                a[j] = c
                a[i] = c + diff
        else:
            qc = 2.0 - 2.0 * q_ij
            qc = qc if qc > 0 else TAU
            delta = (grad[i] - grad[j]) / qc
            total = a[i] + a[j]
            a[i] -= delta
            a[j] += delta
            if total > c:
                if a[i] > c:
                    a[i] = c
                    a[j] = total - c
            elif a[j] < 0:
                a[j] = 0.0
                a[i] = total
            if total > c:
                if a[j] > c:
                    a[j] = c
                    a[i] = total - c
            elif a[i] < 0:
                a[i] = 0.0
                a[j] = total
        d_i = a[i] - old_ai
        d_j = a[j] - old_aj
        # Q[:, i] = sign * sign[i] * K[idx, idx[i]]
        grad += sign * (sign[i] * d_i * ki[idx] + sign[j] * d_j * kj[idx])

    # bias: average over free variables, else midpoint of the feasible range
    yg = sign * grad
    free = (a > 0) & (a < c)
    if np.any(free):
        rho = float(np.mean(yg[free]))
    else:
        ub_mask = np.where(sign > 0, a >= c, a <= 0)
        lb_mask = np.where(sign > 0, a <= 0, a >= c)
        ub = float(np.min(yg[ub_mask])) if np.any(ub_mask) else math.inf
        lb = float(np.max(yg[lb_mask])) if np.any(lb_mask) else -math.inf
        rho = 0.5 * (ub + lb) if math.isfinite(ub) and math.isfinite(lb) else (ub if math.isfinite(ub) else lb)
    return SVRSolution(alpha=a[:l].copy(), alpha_star=a[l:].copy(), bias=-rho, iterations=it, kkt_gap=float(gap))


def _decision(points, support, coef, bias, gamma, chunk=2048):
    points = np.asarray(points, dtype=float)
    nz = coef != 0
    support, coef = np.asarray(support, dtype=float)[nz], coef[nz]
    out = np.empty(points.size)
    for s in range(0, points.size, chunk):
        out[s : s + chunk] = rbf_kernel(points[s : s + chunk], support, gamma) @ coef + bias
    return out


@dataclass(frozen=True)
class KKTReport:
    passed: bool
    max_box_violation: float
    max_complementarity: float
    max_tube_violation: float
    equality_residual: float


def kkt_audit(x, z, sol: SVRSolution, c: float, epsilon: float, gamma: float, tol: float = 1e-3) -> KKTReport:
    """Check box, complementarity, equality and tube conditions of a solution.

    Points with a multiplier strictly inside ``(0, c)`` must sit on the tube
    edge; zero multipliers inside the tube; multipliers at ``c`` outside it.
    """
    alpha, alpha_s = sol.alpha, sol.alpha_star
    box = float(max(np.max(-alpha, initial=0), np.max(-alpha_s, initial=0), np.max(alpha - c, initial=0), np.max(alpha_s - c, initial=0)))
    comp = float(np.max(alpha * alpha_s, initial=0.0))
    eq = float(abs(np.sum(alpha - alpha_s)))
    f = _decision(x, x, alpha - alpha_s, sol.bias, gamma)
    r = np.asarray(z, dtype=float) - f  # residual
    slack = c * 1e-9
    viol = np.zeros_like(r)
    # alpha: upper constraint r <= eps + xi
    free_a = (alpha > slack) & (alpha < c - slack)
    viol = np.maximum(viol, np.where(free_a, np.abs(r - epsilon), 0.0))
    viol = np.maximum(viol, np.where(alpha >= c - slack, np.maximum(0.0, epsilon - r), 0.0))
    free_s = (alpha_s > slack) & (alpha_s < c - slack)
    viol = np.maximum(viol, np.where(free_s, np.abs(r + epsilon), 0.0))
    viol = np.maximum(viol, np.where(alpha_s >= c - slack, np.maximum(0.0, r + epsilon), 0.0))
    zero = (alpha <= slack) & (alpha_s <= slack)
    viol = np.maximum(viol, np.where(zero, np.maximum(0.0, np.abs(r) - epsilon), 0.0))
    tube = float(np.max(viol, initial=0.0))
    passed = box <= 1e-12 * max(c, 1.0) and comp <= tol * c and eq <= 1e-9 * max(c, 1.0) * len(alpha) and tube <= tol
    return KKTReport(passed, box, comp, tube, eq)


@dataclass
class SVRPredictor:
    support_x: np.ndarray  # standardised training features with nonzero coefficient
    coef: np.ndarray  # alpha - alpha_star for those points
    bias: float
    gamma: float
    x_scaler: Scaler
    y_scaler: Scaler
    solution: SVRSolution = field(repr=False)
    kkt: KKTReport = field(repr=False)

    def predict_standardized(self, xs):
        return _decision(xs, self.support_x, self.coef, self.bias, self.gamma)

    def predict(self, x):
        return self.y_scaler.inverse(self.predict_standardized(self.x_scaler.transform(x)))


def fit_svr(train: SupervisedSet, c: float = 1.0, epsilon: float = 0.1, gamma: float = 1.0, tol: float = 1e-3, max_iter: int = 1_000_000) -> SVRPredictor:
    """Fit epsilon-SVR on standardised feature and target.

    ``epsilon`` is expressed in standardised-target units.  Raises
    `NonConvergence` when SMO hits ``max_iter`` and also when the KKT audit of
    the returned solution fails.
    """
    if not c > 0 or not epsilon >= 0 or not gamma > 0:
        raise InvalidHyperparameter(f"need c > 0, epsilon >= 0, gamma > 0 (got {c}, {epsilon}, {gamma})")
    xs_scaler = Scaler.fit(train.x)
    xs = xs_scaler.transform(train.x)
    y_std = float(np.std(train.y))
    ys_scaler = Scaler(float(np.mean(train.y)), y_std if y_std > 0 else 1.0)
    zs = ys_scaler.transform(train.y)
    sol = smo_svr(xs, zs, c, epsilon, gamma, tol=tol, max_iter=max_iter)
    report = kkt_audit(xs, zs, sol, c, epsilon, gamma, tol=tol)
    if not report.passed:
        raise NonConvergence(f"SVR solution failed the KKT audit: {report}")
    coef = sol.alpha - sol.alpha_star
    keep = coef != 0
    return SVRPredictor(
        support_x=xs[keep],
        coef=coef[keep],
        bias=sol.bias,
        gamma=gamma,
        x_scaler=xs_scaler,
        y_scaler=ys_scaler,
        solution=sol,
        kkt=report,
    )


# --- k nearest neighbours ----------------------------------------------------


@dataclass
class KNNPredictor:
    train_xs: np.ndarray
    train_y: np.ndarray
    k: int
    scaler: Scaler

    def predict(self, x):
        q = self.scaler.transform(np.atleast_1d(x))
        out = np.empty(q.size)
        for s in range(0, q.size, 512):
            block = q[s : s + 512]
            dist = np.abs(block[:, None] - self.train_xs[None, :])
            # stable sort: equal distances keep training order
            nearest = np.argsort(dist, axis=1, kind="stable")[:, : self.k]
            out[s : s + 512] = self.train_y[nearest].mean(axis=1)
        return out


def fit_knn(train: SupervisedSet, k: int = 5) -> KNNPredictor:
    if int(k) != k or not 1 <= k <= len(train):
        raise InvalidK(f"k must be an integer in [1, {len(train)}], got {k}")
    scaler = Scaler.fit(train.x)
    return KNNPredictor(scaler.transform(train.x), np.asarray(train.y, dtype=float), int(k), scaler)


# --- metrics and the comparison driver ---------------------------------------


def compute_metrics(actual, predicted) -> dict:
    """MAE, MAPE (percent), MSE and RMSE."""
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if a.shape != p.shape:
        raise LengthMismatch(f"lengths differ: {a.size} != {p.size}")
    if a.size < 1:
        raise TooShort("metrics need at least one point")
    if np.any(a == 0):
        raise ZeroActualForMape("MAPE is undefined when an actual value is zero")
    err = a - p
    mse = float(np.mean(err**2))
    return {
        "mae": float(np.mean(np.abs(err))),
        "mape_percent": float(100.0 * np.mean(np.abs(err) / np.abs(a))),
        "mse": mse,
        "rmse": math.sqrt(mse),
    }


@dataclass(frozen=True)
class MLConfig:
    ratio: float = 0.8
    svr_c: float = 1.0
    svr_epsilon: float = 0.1
    svr_gamma: float = 1.0
    knn_k: int = 5

    def to_dict(self) -> dict:
        return {
            "ratio": self.ratio,
            "svr_c": self.svr_c,
            "svr_epsilon": self.svr_epsilon,
            "svr_gamma": self.svr_gamma,
            "knn_k": self.knn_k,
            "scaling": "feature standardised for svr and knn; svr target standardised, predictions inverted",
        }


@dataclass
class MetricsReport:
    metrics: dict  # model -> metric dict
    predictions: dict  # model -> predicted array on the test set
    test_dates: np.ndarray
    test_actual: np.ndarray
    n_train: int
    n_test: int
    config: MLConfig
    details: dict = field(default_factory=dict)

    MODELS = ("linear", "svr", "knn")

    def to_dict(self) -> dict:
        return {
            "n_train": self.n_train,
            "n_test": self.n_test,
            "hyperparameters": self.config.to_dict(),
            "metrics": {m: dict(self.metrics[m]) for m in self.MODELS},
            "details": dict(self.details),
        }


def run_comparison(data: SupervisedSet, config: MLConfig = MLConfig()) -> MetricsReport:
    """Split chronologically, fit OLS/SVR/KNN on train and score on test."""
    split = chrono_split(data, config.ratio)
    train, test = split.train, split.test
    ols = fit_ols(train)
    svr = fit_svr(train, c=config.svr_c, epsilon=config.svr_epsilon, gamma=config.svr_gamma)
    knn = fit_knn(train, k=config.knn_k)
    predictions = {
        "linear": ols.predict(test.x),
        "svr": svr.predict(test.x),
        "knn": knn.predict(test.x),
    }
    metrics = {name: compute_metrics(test.y, pred) for name, pred in predictions.items()}
    details = {
        "linear": {"slope": ols.slope, "intercept": ols.intercept},
        "svr": {
            "iterations": svr.solution.iterations,
            "kkt_gap": svr.solution.kkt_gap,
            "n_support": int(svr.coef.size),
            "bias_standardized": svr.bias,
            "kkt_audit_passed": svr.kkt.passed,
        },
        "knn": {"k": knn.k},
    }
    return MetricsReport(
        metrics=metrics,
        predictions=predictions,
        test_dates=test.dates,
        test_actual=test.y,
        n_train=len(train),
        n_test=len(test),
        config=config,
        details=details,
    )
