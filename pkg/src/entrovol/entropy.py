"""Sample entropy (Richman & Moorman) with a brute-force reference.

Counts are over *ordered* template pairs ``(i, j)``, ``i != j``, with both
template lengths ``m`` and ``m + 1`` drawn from the same ``N - m`` start
indices, and a match meaning Chebyshev distance ``<= r``::

    SampEn = -ln(A / B)

where ``B`` counts length-``m`` matches and ``A`` length-``m + 1`` matches.
The value is undefined (``None``) whenever ``A == 0`` or ``B == 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import DegenerateTolerance, LengthMismatch, SeriesTooShort
from .series import RollingConfig, rolling_apply


@dataclass(frozen=True)
class Absolute:
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"absolute tolerance must be > 0, got {self.r}")


@dataclass(frozen=True)
class RelativeToStd:
    fraction: float = 0.2

    def __post_init__(self):
        if not self.fraction > 0:
            raise ValueError(f"tolerance fraction must be > 0, got {self.fraction}")


@dataclass(frozen=True)
class SampEnParams:
    m: int = 2
    tolerance: Absolute | RelativeToStd = RelativeToStd(0.2)

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"embedding dimension must be an integer >= 1, got {self.m}")


@dataclass(frozen=True)
class MatchCounts:
    b_pairs: int
    a_pairs: int
    templates: int


@dataclass(frozen=True)
class SampEnResult:
    value: float | None
    counts: MatchCounts
    effective_r: float

    @property
    def defined(self) -> bool:
        return self.value is not None


def chebyshev_distance(u, v) -> float:
    """Largest absolute coordinate difference between ``u`` and ``v``."""
    if len(u) != len(v):
        raise LengthMismatch(f"lengths differ: {len(u)} != {len(v)}")
    if len(u) == 0:
        raise LengthMismatch("sequences must be non-empty")
    return max(abs(a - b) for a, b in zip(u, v))


def _check_length(n, m):
    if n < m + 2:
        raise SeriesTooShort(f"need at least m + 2 = {m + 2} points, got {n}")


def resolve_tolerance(window, params: SampEnParams) -> float:
    tol = params.tolerance
    if isinstance(tol, Absolute):
        return float(tol.r)
    window = np.asarray(window, dtype=float)
    if window.min() == window.max():
        raise DegenerateTolerance("relative tolerance on a constant window")
    return float(tol.fraction * np.std(window, ddof=1))


@numba.njit(cache=True, nogil=True)
def _count_pairs(x, m, r):
    n_templates = x.shape[0] - m
    b = 0
    a = 0
    for i in range(n_templates - 1):
        for j in range(i + 1, n_templates):
            ok = True
            for k in range(m):
                if abs(x[i + k] - x[j + k]) > r:
                    ok = False
                    break
            if ok:
                b += 1
                if abs(x[i + m] - x[j + m]) <= r:
                    a += 1
    # each unordered pair stands for (i, j) and (j, i)
    return 2 * b, 2 * a


def count_matches(window, m: int, r: float) -> MatchCounts:
    """Ordered-pair match counts for template lengths ``m`` and ``m + 1``."""
    x = np.ascontiguousarray(window, dtype=np.float64)
    _check_length(len(x), m)
    if not r > 0:
        raise ValueError(f"tolerance must be > 0, got {r}")
    b, a = _count_pairs(x, int(m), float(r))
    return MatchCounts(b_pairs=int(b), a_pairs=int(a), templates=len(x) - m)


def _result(counts, r):
    if counts.a_pairs == 0 or counts.b_pairs == 0:
        return SampEnResult(None, counts, r)
    # a <= b, so the ratio is at most one and the value is >= 0 (-0.0 folded to 0)
    return SampEnResult(-math.log(counts.a_pairs / counts.b_pairs) + 0.0, counts, r)


def sample_entropy(window, params: SampEnParams = SampEnParams()) -> SampEnResult:
    """Sample entropy of one window.

    Examples
    --------
    >>> sample_entropy([1, 2] * 5, SampEnParams(2, Absolute(0.5))).value
    0.0
    """
    x = np.asarray(window, dtype=float)
    _check_length(len(x), params.m)
    r = resolve_tolerance(x, params)
    return _result(count_matches(x, params.m, r), r)


def sample_entropy_naive(window, params: SampEnParams = SampEnParams()) -> SampEnResult:
    """Reference implementation: every ordered template pair, nothing clever."""
    v = [float(t) for t in window]
    n, m = len(v), params.m
    _check_length(n, m)
    r = resolve_tolerance(v, params)
    n_templates = n - m
    b = a = 0
    for i in range(n_templates):
        for j in range(n_templates):
            if i == j:
                continue
            if chebyshev_distance(v[i : i + m], v[j : j + m]) <= r:
                b += 1
            if chebyshev_distance(v[i : i + m + 1], v[j : j + m + 1]) <= r:
                a += 1
    return _result(MatchCounts(b_pairs=b, a_pairs=a, templates=n_templates), r)


def rolling_sample_entropy(
    series,
    config: RollingConfig = RollingConfig(),
    params: SampEnParams = SampEnParams(),
    workers: int = 1,
):
    """Sample entropy over rolling windows.

    The tolerance is re-resolved per window.  A window whose entropy is
    undefined, or whose relative tolerance is degenerate (constant window),
    is recorded as undefined.  The per-window tolerance is kept in
    ``result.extra["effective_r"]``.
    """
    if config.width < params.m + 2:
        raise SeriesTooShort(f"window width {config.width} is below m + 2 = {params.m + 2}")

    def statistic(window):
        try:
            return sample_entropy(window, params).value
        except DegenerateTolerance:
            return None

    dates, values = series if isinstance(series, tuple) else (series.dates, series.values)
    values = np.asarray(values, dtype=float)
    out = rolling_apply((dates, values), config, statistic, workers=workers)
    out.extra["effective_r"] = _effective_radii(values, config, params)
    return out


def _effective_radii(values, config, params):
    n = config.n_windows(len(values))
    if isinstance(params.tolerance, Absolute):
        return np.full(n, float(params.tolerance.r))
    starts = np.arange(n) * config.step
    radii = np.empty(n)
    for k, s in enumerate(starts):
        w = values[s : s + config.width]
        radii[k] = np.nan if w.min() == w.max() else params.tolerance.fraction * np.std(w, ddof=1)
    return radii
