"""Command-line pipeline: ``entrovol <ingest|rolling|diagnose|arimax|ml|all>``.

Each subcommand reads its inputs from the output directory written by the
previous stage (``--input`` is the raw FRED file for ``ingest`` and ``all``),
so stages can be re-run independently.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .arimax import ArimaxSpec, fit_regression_arima_errors, forecast, residual_diagnostics, select_order
from .entropy import Absolute, RelativeToStd, SampEnParams, rolling_sample_entropy
from .errors import EntrovolError, HorizonZero, IoFailure
from .ingest import atomic_write_text, format_value, load_prices, read_series_csv, write_series_csv
from .ml import MLConfig, align_rolling, run_comparison
from .report import manifest, write_json
from .series import RollingConfig, RollingSeries, log_returns, rolling_std
from .stats import adf_test, ljung_box, pearson
from .svg import forecast_chart, line_chart, residual_chart

PRICES_CSV = "prices.csv"
STD_CSV = "ts_std.csv"
SAMPEN_CSV = "ts_sampen.csv"


@dataclass
class PipelineConfig:
    input: str | None = None
    out: str = "entrovol-out"
    width: int = 252
    step: int = 1
    m: int = 2
    r_mode: str = "rel"
    r: float = 0.2
    order: tuple = (4, 1, 3)
    auto_order: bool = False
    horizon: int = 300
    ratio: float = 0.8
    svr_c: float = 1.0
    svr_eps: float = 0.1
    svr_gamma: float = 1.0
    knn_k: int = 5
    seed: int = 20230410
    emit_r: bool = False
    workers: int = 1

    @property
    def rolling(self) -> RollingConfig:
        return RollingConfig(self.width, self.step)

    @property
    def sampen(self) -> SampEnParams:
        tol = RelativeToStd(self.r) if self.r_mode == "rel" else Absolute(self.r)
        return SampEnParams(self.m, tol)

    @property
    def arimax(self) -> ArimaxSpec:
        p, d, q = self.order
        return ArimaxSpec(p, d, q, include_regressor=True)

    @property
    def ml(self) -> MLConfig:
        return MLConfig(self.ratio, self.svr_c, self.svr_eps, self.svr_gamma, self.knn_k)

    def path(self, name) -> Path:
        return Path(self.out) / name

    def echo(self) -> dict:
        d = asdict(self)
        d["order"] = list(self.order)
        return d


@dataclass
class StageOutput:
    files: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def _write(stage: StageOutput, path: Path, text: str) -> None:
    atomic_write_text(path, text)
    stage.files.append(path)


def _write_json(stage: StageOutput, path: Path, payload: dict) -> None:
    write_json(path, payload)
    stage.files.append(path)


def _require(path: Path, hint: str) -> Path:
    if not path.exists():
        raise IoFailure(f"missing input {path} ({hint})")
    return path


def _read_rolling(path: Path, config: RollingConfig) -> RollingSeries:
    dates, values, extras = read_series_csv(path)
    defined = extras["defined"] == 1 if "defined" in extras else np.isfinite(values)
    return RollingSeries(dates=dates, values=values, defined=defined, config=config)


def _dated_table(header, dates, *columns) -> str:
    lines = [",".join(header)]
    for k, d in enumerate(dates):
        lines.append(",".join([str(np.datetime64(d, "D")), *(format_value(c[k]) for c in columns)]))
    return "\n".join(lines) + "\n"


def cmd_ingest(cfg: PipelineConfig) -> StageOutput:
    if not cfg.input:
        raise IoFailure("ingest needs --input (a FRED CSV file)")
    if not Path(cfg.input).exists():
        raise IoFailure(f"input file not found: {cfg.input}")
    prices = load_prices(cfg.input)
    stage = StageOutput()
    write_series_csv(prices, cfg.path(PRICES_CSV))
    stage.files.append(cfg.path(PRICES_CSV))
    report = prices.report.to_dict()
    report.update(
        {
            "source_id": prices.source_id,
            "first_date": str(prices.dates[0]),
            "last_date": str(prices.dates[-1]),
        }
    )
    _write_json(stage, cfg.path("cleaning_report.json"), {"cleaning": report})
    stage.summary = {"cleaning": report}
    return stage


def cmd_rolling(cfg: PipelineConfig) -> StageOutput:
    src = Path(cfg.input) if cfg.input else cfg.path(PRICES_CSV)
    prices = load_prices(_require(src, "run `entrovol ingest` first"))
    returns = log_returns(prices)
    ts_std = rolling_std(returns, cfg.rolling)
    ts_sampen = rolling_sample_entropy(returns, cfg.rolling, cfg.sampen, workers=cfg.workers)
    stage = StageOutput()
    write_series_csv(ts_std, cfg.path(STD_CSV), {"defined": ts_std.defined.astype(int)})
    extra = {"defined": ts_sampen.defined.astype(int)}
    if cfg.emit_r:
        extra["effective_r"] = ts_sampen.extra["effective_r"]
    write_series_csv(ts_sampen, cfg.path(SAMPEN_CSV), extra)
    stage.files += [cfg.path(STD_CSV), cfg.path(SAMPEN_CSV)]
    _write(
        stage,
        cfg.path("fig1_ts_std.svg"),
        line_chart(ts_std.dates, [("ts_std", ts_std.values)], f"Rolling standard deviation of log returns (window {cfg.width})", "", "std"),
    )
    _write(
        stage,
        cfg.path("fig2_ts_sampen.svg"),
        line_chart(ts_sampen.dates, [("ts_SampEn", ts_sampen.values)], f"Rolling sample entropy (m={cfg.m}, window {cfg.width})", "", "SampEn (nats)"),
    )
    stage.summary = {
        "prices": len(prices),
        "returns": len(returns),
        "rolling_points": len(ts_std),
        "sampen_undefined": ts_sampen.n_undefined,
        "first_window_date": str(ts_std.dates[0]),
        "last_window_date": str(ts_std.dates[-1]),
    }
    return stage


def _load_rolling_pair(cfg: PipelineConfig):
    hint = "run `entrovol rolling` first"
    ts_std = _read_rolling(_require(cfg.path(STD_CSV), hint), cfg.rolling)
    ts_sampen = _read_rolling(_require(cfg.path(SAMPEN_CSV), hint), cfg.rolling)
    return ts_std, ts_sampen


def diagnostics(ts_std: RollingSeries, ts_sampen: RollingSeries) -> dict:
    data, dropped = align_rolling(ts_sampen, ts_std)
    _, std_vals = ts_std.defined_only()
    _, se_vals = ts_sampen.defined_only()
    return {
        "pearson": {"statistic": pearson(data.y, data.x), "n": len(data), "dropped_undefined": dropped},
        "adf": {"ts_std": adf_test(std_vals).to_dict(), "ts_sampen": adf_test(se_vals).to_dict()},
        "ljung_box": {
            "ts_std": ljung_box(std_vals, lags=10).to_dict(),
            "ts_sampen": ljung_box(se_vals, lags=10).to_dict(),
        },
    }


def cmd_diagnose(cfg: PipelineConfig) -> StageOutput:
    ts_std, ts_sampen = _load_rolling_pair(cfg)
    stage = StageOutput()
    result = diagnostics(ts_std, ts_sampen)
    _write_json(stage, cfg.path("diagnostics.json"), {"diagnostics": result})
    stage.summary = result
    return stage


def cmd_arimax(cfg: PipelineConfig) -> StageOutput:
    if cfg.horizon < 1:
        raise HorizonZero(f"--horizon must be at least 1, got {cfg.horizon}")
    ts_std, ts_sampen = _load_rolling_pair(cfg)
    data, dropped = align_rolling(ts_sampen, ts_std)
    if cfg.auto_order:
        fit, table = select_order(data.y, data.x, dates=data.dates, seed=cfg.seed)
        search = [{"order": list(o), "aicc": a} for o, a in table]
    else:
        fit = fit_regression_arima_errors(data.y, data.x, cfg.arimax, dates=data.dates, seed=cfg.seed)
        search = []
    diag = residual_diagnostics(fit, lags=10)
    fc = forecast(fit, cfg.horizon)
    stage = StageOutput()
    _write_json(
        stage,
        cfg.path("arimax_fit.json"),
        {"fit": fit.summary_dict(), "dropped_undefined": dropped, "order_search": search, "forecast": fc.to_dict()},
    )
    _write_json(stage, cfg.path("residual_diagnostics.json"), {"residual_diagnostics": diag.to_dict()})
    acf_lags = diag.acf.lags if diag.acf is not None else np.arange(1, 2)
    acf_vals = diag.acf.values if diag.acf is not None else np.zeros(1)
    _write(
        stage,
        cfg.path("fig3_residuals.svg"),
        residual_chart(fit.residual_dates, fit.residuals, acf_lags, acf_vals, diag.hist_edges, diag.hist_counts,
                       f"Residuals from regression with {fit.spec.label()} errors"),
    )
    steps = np.arange(1, cfg.horizon + 1)
    _write(
        stage,
        cfg.path("forecast.csv"),
        "step,point,lo80,hi80,lo95,hi95\n"
        + "".join(
            f"{s},{format_value(a)},{format_value(b)},{format_value(c)},{format_value(d)},{format_value(e)}\n"
            for s, a, b, c, d, e in zip(steps, fc.point, fc.lower80, fc.upper80, fc.lower95, fc.upper95)
        ),
    )
    last = np.datetime64(data.dates[-1], "D")
    fc_dates = np.busday_offset(last, steps, roll="forward")
    _write(
        stage,
        cfg.path("fig4_forecast.svg"),
        forecast_chart(data.dates, data.y, fc_dates, fc.point, fc.lower80, fc.upper80, fc.lower95, fc.upper95,
                       f"Forecasts from regression with {fit.spec.label()} errors", "ts_std"),
    )
    stage.summary = {
        "fit": {k: v for k, v in fit.summary_dict().items() if k != "optimizer"},
        "residual_ljung_box": None if diag.ljung_box is None else diag.ljung_box.to_dict(),
    }
    return stage


def cmd_ml(cfg: PipelineConfig) -> StageOutput:
    ts_std, ts_sampen = _load_rolling_pair(cfg)
    data, dropped = align_rolling(ts_sampen, ts_std)
    if dropped:
        print(f"entrovol: dropped {dropped} window(s) with undefined SampEn", file=sys.stderr)
    report = run_comparison(data, cfg.ml)
    stage = StageOutput()
    payload = report.to_dict()
    payload["dropped_undefined"] = dropped
    _write_json(stage, cfg.path("ml_metrics.json"), {"ml": payload})
    titles = {"linear": "linear regression", "svr": "SVM regression", "knn": "KNN regression"}
    for name in report.MODELS:
        pred = report.predictions[name]
        _write(stage, cfg.path(f"trace_{name}.csv"), _dated_table(("date", "actual", "predicted"), report.test_dates, report.test_actual, pred))
        _write(
            stage,
            cfg.path(f"fig_ml_{name}.svg"),
            line_chart(report.test_dates, [("actual", report.test_actual), ("predicted", pred)],
                       f"Actual versus predicted std on the test set ({titles[name]})", "", "std"),
        )
    stage.summary = payload
    return stage


STAGES = (
    ("ingest", cmd_ingest),
    ("rolling", cmd_rolling),
    ("diagnose", cmd_diagnose),
    ("arimax", cmd_arimax),
    ("ml", cmd_ml),
)


def cmd_all(cfg: PipelineConfig) -> StageOutput:
    """Run every stage in order, then write ``manifest.json`` and ``run_report.json``.

    The manifest only lists deterministic artifacts; the run report also
    carries wall-clock timings and is therefore excluded from it.
    """
    files, summaries, timings = [], {}, {}
    # later stages read what ingest wrote, not the raw file
    downstream = replace(cfg, input=None)
    for name, fn in STAGES:
        t0 = time.perf_counter()
        out = fn(cfg if name == "ingest" else downstream)
        timings[name] = time.perf_counter() - t0
        files += out.files
        summaries[name] = out.summary
    entries = manifest(files, cfg.out)
    stage = StageOutput(files=list(files))
    _write_json(stage, cfg.path("manifest.json"), {"tool_version": __version__, "files": entries})
    report = {
        "tool_version": __version__,
        "config": cfg.echo(),
        "cleaning": summaries["ingest"]["cleaning"],
        "series_lengths": summaries["rolling"],
        "diagnostics": summaries["diagnose"],
        "correlation": summaries["diagnose"]["pearson"]["statistic"],
        "arimax": summaries["arimax"],
        "ml": summaries["ml"],
        "manifest": entries,
        "timings_seconds": timings,
    }
    _write_json(stage, cfg.path("run_report.json"), report)
    stage.summary = report
    return stage


COMMANDS = dict(STAGES, all=cmd_all)


def _order(text: str):
    try:
        p, d, q = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected p,d,q (e.g. 4,1,3), got {text!r}") from None
    return (p, d, q)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    d = PipelineConfig()
    common.add_argument("--input", default=None, help="FRED CSV (ingest/all) or cleaned price CSV (rolling)")
    common.add_argument("--out", default=d.out, help="output directory (ENTROVOL_OUT overrides)")
    common.add_argument("--width", type=int, default=d.width, help="rolling window width in points")
    common.add_argument("--step", type=int, default=d.step, help="rolling window shift in points")
    common.add_argument("--m", type=int, default=d.m, help="SampEn embedding dimension")
    common.add_argument("--r-mode", choices=("abs", "rel"), default=d.r_mode, help="tolerance rule: absolute or fraction of window std")
    common.add_argument("--r", type=float, default=d.r, help="tolerance value for --r-mode")
    common.add_argument("--order", type=_order, default=d.order, help="ARIMA error order p,d,q")
    common.add_argument("--auto-order", action="store_true", help="search p,q <= 5, d <= 1 by AICc instead of --order")
    common.add_argument("--horizon", type=int, default=d.horizon, help="forecast horizon in steps")
    common.add_argument("--ratio", type=float, default=d.ratio, help="chronological train fraction")
    common.add_argument("--svr-c", type=float, default=d.svr_c, help="SVR penalty C")
    common.add_argument("--svr-eps", type=float, default=d.svr_eps, help="SVR tube width (standardised target units)")
    common.add_argument("--svr-gamma", type=float, default=d.svr_gamma, help="SVR RBF width")
    common.add_argument("--knn-k", type=int, default=d.knn_k, help="KNN neighbour count")
    common.add_argument("--seed", type=int, default=d.seed, help="seed for optimizer multi-starts")
    common.add_argument("--emit-r", action="store_true", help="add the per-window effective tolerance to ts_sampen.csv")
    common.add_argument("--workers", type=int, default=d.workers, help="threads for the rolling SampEn stage")

    parser = argparse.ArgumentParser(
        prog="entrovol",
        description="Sample entropy versus rolling volatility of log returns.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{ingest,rolling,diagnose,arimax,ml,all}")
    helps = {
        "ingest": "parse and clean a FRED price file",
        "rolling": "rolling std and SampEn series plus figures 1-2",
        "diagnose": "ADF, Ljung-Box and Pearson for the rolling series",
        "arimax": "regression with ARIMA errors, residual checks, forecast",
        "ml": "OLS / SVR / KNN comparison on a chronological split",
        "all": "run every stage and write a run report",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    return parser


def config_from_args(args) -> PipelineConfig:
    out = os.environ.get("ENTROVOL_OUT") or args.out
    return PipelineConfig(
        input=args.input,
        out=out,
        width=args.width,
        step=args.step,
        m=args.m,
        r_mode=args.r_mode,
        r=args.r,
        order=tuple(args.order),
        auto_order=args.auto_order,
        horizon=args.horizon,
        ratio=args.ratio,
        svr_c=args.svr_c,
        svr_eps=args.svr_eps,
        svr_gamma=args.svr_gamma,
        knn_k=args.knn_k,
        seed=args.seed,
        emit_r=args.emit_r,
        workers=args.workers,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        # validate the parameter objects up front so bad flags fail fast
        cfg.rolling, cfg.sampen, cfg.arimax, cfg.ml
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        out = COMMANDS[args.command](cfg)
    except (EntrovolError, ValueError, OSError) as exc:
        print(f"entrovol: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for f in out.files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
