"""Log returns and the rolling-window engine."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import TooShort, WindowTooWide


@dataclass(frozen=True)
class ReturnSeries:
    dates: np.ndarray  # date of the later price in each pair
    values: np.ndarray

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class RollingConfig:
    width: int = 252
    step: int = 1

    def __post_init__(self):
        if int(self.width) != self.width or self.width < 2:
            raise ValueError(f"window width must be an integer >= 2, got {self.width}")
        if int(self.step) != self.step or self.step < 1:
            raise ValueError(f"window step must be an integer >= 1, got {self.step}")

    def n_windows(self, length: int) -> int:
        if length < self.width:
            return 0
        return (length - self.width) // self.step + 1


@dataclass(frozen=True)
class RollingSeries:
    """Statistic per window, labelled by the window's right-edge date.

    ``defined`` is False for windows where the statistic has no value; the
    corresponding entry of ``values`` is NaN and must not be used.
    """

    dates: np.ndarray
    values: np.ndarray
    defined: np.ndarray
    config: RollingConfig
    extra: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.values)

    @property
    def n_undefined(self) -> int:
        return int(np.count_nonzero(~self.defined))

    def defined_only(self):
        """(dates, values) restricted to defined windows."""
        return self.dates[self.defined], self.values[self.defined]


def log_returns(prices) -> ReturnSeries:
    """Natural-log returns ``ln(P[n] / P[n-1])`` dated at the later price."""
    values = np.asarray(prices.prices if hasattr(prices, "prices") else prices.values, dtype=float)
    if len(values) < 2:
        raise TooShort("log returns need at least 2 prices")
    if np.any(values <= 0):
        raise ValueError("log returns need strictly positive prices")
    return ReturnSeries(dates=np.asarray(prices.dates)[1:], values=np.log(values[1:] / values[:-1]))


def _unpack(series):
    if isinstance(series, tuple):
        dates, values = series
    else:
        dates, values = series.dates, series.values
    return np.asarray(dates), np.asarray(values, dtype=float)


def window_starts(length: int, config: RollingConfig) -> np.ndarray:
    if config.width > length:
        raise WindowTooWide(f"window width {config.width} exceeds series length {length}")
    return np.arange(config.n_windows(length)) * config.step


def rolling_apply(series, config: RollingConfig, statistic, workers: int = 1) -> RollingSeries:
    """Evaluate ``statistic`` on every window of ``series``.

    ``statistic`` maps a 1-D window array to a float, or to None when the
    statistic is undefined for that window.  With ``workers > 1`` windows are
    evaluated on a thread pool; the output order never depends on it.
    """
    dates, values = _unpack(series)
    starts = window_starts(len(values), config)
    windows = (values[s : s + config.width] for s in starts)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(statistic, windows, chunksize=64))
    else:
        results = [statistic(w) for w in windows]
    defined = np.array([r is not None for r in results], dtype=bool)
    out = np.array([np.nan if r is None else float(r) for r in results], dtype=float)
    return RollingSeries(
        dates=dates[starts + config.width - 1],
        values=out,
        defined=defined,
        config=config,
    )


def rolling_std(series, config: RollingConfig) -> RollingSeries:
    """Sample (ddof=1) standard deviation over each window.

    Uses running sums of the centred data; windows where the streaming
    variance is small enough for cancellation to matter are recomputed
    directly, and constant windows give exactly 0.
    """
    dates, values = _unpack(series)
    starts = window_starts(len(values), config)
    w = config.width
    centred = values - values.mean()
    s1 = np.concatenate(([0.0], np.cumsum(centred)))
    s2 = np.concatenate(([0.0], np.cumsum(centred * centred)))
    sum1 = s1[starts + w] - s1[starts]
    sum2 = s2[starts + w] - s2[starts]
    var = (sum2 - sum1 * sum1 / w) / (w - 1)
    # cancellation guard: relative to the window's raw second moment
    suspect = var <= 1e-8 * sum2 / (w - 1)
    for k in np.flatnonzero(suspect):
        win = values[starts[k] : starts[k] + w]
        var[k] = 0.0 if win.min() == win.max() else np.var(win, ddof=1)
    return RollingSeries(
        dates=dates[starts + w - 1],
        values=np.sqrt(np.maximum(var, 0.0)),
        defined=np.ones(len(starts), dtype=bool),
        config=config,
    )
