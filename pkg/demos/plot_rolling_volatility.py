"""
Rolling volatility and rolling sample entropy
=============================================

Simulate a price series with a burst of volatility, take log returns, and
compute the standard deviation and the sample entropy over one-year
(252-point) windows.  Calm stretches of near-zero returns look regular to
sample entropy, volatile stretches do not, but within a window the large
swings inflate the tolerance, so the two measures tend to move against each
other.
"""

from pathlib import Path

import numpy as np

from entrovol import RollingConfig, log_returns, pearson, rolling_sample_entropy, rolling_std
from entrovol.ingest import PriceSeries
from entrovol.svg import line_chart
from entrovol.synthetic import simulate_prices

out = Path("demo-out")
out.mkdir(exist_ok=True)

# %%
# About 37 years of business days with one high-volatility episode.
dates, prices = simulate_prices(9389, seed=7, shock=(8550, 8700, 4.0))
returns = log_returns(PriceSeries(dates, prices))
print(len(prices), "prices ->", len(returns), "returns")

# %%
# Both rolling series are labelled by the last date of their window.
config = RollingConfig(width=252, step=1)
ts_std = rolling_std(returns, config)
ts_sampen = rolling_sample_entropy(returns, config)
print(len(ts_std), "windows,", ts_sampen.n_undefined, "with undefined entropy")

ok = ts_sampen.defined
print("Pearson(std, SampEn) =", round(pearson(ts_std.values[ok], ts_sampen.values[ok]), 3))

# %%
# Deterministic SVG line charts, one per series.
(out / "rolling_std.svg").write_text(line_chart(ts_std.dates, [("ts_std", ts_std.values)], "Rolling std", "", "std"))
(out / "rolling_sampen.svg").write_text(line_chart(ts_sampen.dates, [("ts_SampEn", ts_sampen.values)], "Rolling SampEn", "", "nats"))
print("wrote", sorted(p.name for p in out.glob("rolling_*.svg")))
