"""
The whole pipeline
==================

Runs ingest, rolling statistics, diagnostics, the ARIMA-error regression and
the ML comparison, exactly as ``entrovol all`` does.  Point
``ENTROVOL_WTI_CSV`` at a FRED ``DCOILWTICO`` download to use real oil
prices; otherwise a synthetic FRED-style file is generated.
"""

import json
import os
from pathlib import Path

from entrovol.cli import PipelineConfig, cmd_all
from entrovol.synthetic import fred_csv_text, simulate_prices

out = Path("demo-out/pipeline")
out.mkdir(parents=True, exist_ok=True)

source = os.environ.get("ENTROVOL_WTI_CSV")
if source is None:
    dates, prices = simulate_prices(9389, seed=7, shock=(8550, 8700, 4.0))
    source = out / "synthetic_fred.csv"
    source.write_text(fred_csv_text(dates, prices, missing=(100, 2000, 5000)))

# %%
report = cmd_all(PipelineConfig(input=str(source), out=str(out))).summary
print("rolling points:", report["series_lengths"]["rolling_points"])
print("Pearson:", round(report["correlation"], 3))
print("beta:", report["arimax"]["fit"]["beta"])
print(json.dumps(report["ml"]["metrics"], indent=1))
print("timings:", {k: round(v, 2) for k, v in report["timings_seconds"].items()})
