"""Sample entropy and rolling volatility of log returns."""

__version__ = "0.1.0"

from .arimax import ArimaxSpec, fit_regression_arima_errors, forecast, residual_diagnostics
from .entropy import Absolute, RelativeToStd, SampEnParams, count_matches, rolling_sample_entropy, sample_entropy
from .ingest import clean_series, load_prices, parse_fred_csv, write_series_csv
from .ml import MLConfig, SupervisedSet, chrono_split, compute_metrics, run_comparison
from .series import RollingConfig, log_returns, rolling_apply, rolling_std
from .stats import acf, adf_test, chi_square_sf, ljung_box, pearson

__all__ = [
    "Absolute",
    "ArimaxSpec",
    "MLConfig",
    "RelativeToStd",
    "RollingConfig",
    "SampEnParams",
    "SupervisedSet",
    "acf",
    "adf_test",
    "chi_square_sf",
    "chrono_split",
    "clean_series",
    "compute_metrics",
    "count_matches",
    "fit_regression_arima_errors",
    "forecast",
    "ljung_box",
    "load_prices",
    "log_returns",
    "parse_fred_csv",
    "pearson",
    "residual_diagnostics",
    "rolling_apply",
    "rolling_sample_entropy",
    "rolling_std",
    "run_comparison",
    "sample_entropy",
    "write_series_csv",
]
