"""Synthetic daily price series with clustered volatility.

Used by the test-suite and the demo scripts when the FRED file is not at
hand.  Log-volatility follows a Gaussian AR(1); an optional shock window
multiplies volatility to mimic a crisis.
"""

from __future__ import annotations

import numpy as np


def business_dates(n: int, start: str = "1986-01-02") -> np.ndarray:
    first = np.busday_offset(np.datetime64(start, "D"), 0, roll="forward")
    return np.busday_offset(first, np.arange(n), roll="forward")


def simulate_prices(
    n: int = 2000,
    seed: int = 0,
    start_price: float = 25.0,
    base_vol: float = 0.02,
    persistence: float = 0.98,
    vol_of_vol: float = 0.15,
    shock: tuple[int, int, float] | None = None,
    start: str = "1986-01-02",
):
    """Return ``(dates, prices)`` of length ``n``.

    ``shock = (first, last, factor)`` scales volatility by ``factor`` on
    return indices ``first..last``.
    """
    rng = np.random.default_rng(seed)
    h = np.empty(n - 1)
    h[0] = 0.0
    eps = rng.standard_normal(n - 1)
    for t in range(1, n - 1):
        h[t] = persistence * h[t - 1] + vol_of_vol * eps[t]
    vol = base_vol * np.exp(h)
    if shock is not None:
        first, last, factor = shock
        vol[first : last + 1] *= factor
    returns = vol * rng.standard_normal(n - 1)
    prices = start_price * np.exp(np.concatenate(([0.0], np.cumsum(returns))))
    return business_dates(n, start), prices


def fred_csv_text(dates, prices, series_id: str = "DCOILWTICO", missing=()) -> str:
    """Render prices in FRED layout; indices in ``missing`` are written as ``.``."""
    missing = set(missing)
    rows = [f"DATE,{series_id}"]
    for k, (d, p) in enumerate(zip(dates, prices)):
        rows.append(f"{np.datetime64(d, 'D')},{'.' if k in missing else f'{p:.2f}'}")
    return "\n".join(rows) + "\n"
