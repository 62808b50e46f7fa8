"""Reading, cleaning and writing FRED-style daily price files.

FRED publishes daily series as a two-column CSV::

    DATE,DCOILWTICO
    1986-01-02,25.56
    1986-01-03,.

A ``.`` (or an empty field) marks a missing observation.  Cleaning drops
missing rows and non-positive prices; nothing is interpolated.
"""

from __future__ import annotations

import datetime as _dt
import io
import math
import os
import tempfile
import urllib.request
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyFile,
    IoFailure,
    MalformedRow,
    NonMonotonicDates,
    TooShort,
)

MISSING_MARKERS = frozenset({".", ""})
FRED_URL = "https://fred.stlouisfed.org/graph/fredgraph.csv?id={series_id}"


@dataclass(frozen=True)
class RawObservation:
    date: _dt.date
    value: float | None  # None is the missing-marker


@dataclass(frozen=True)
class CleaningReport:
    rows_in: int
    kept: int
    dropped_missing: int
    dropped_nonpositive: int
    dropped_nonpositive_dates: tuple[str, ...] = ()

    @property
    def dropped(self) -> int:
        return self.dropped_missing + self.dropped_nonpositive

    def to_dict(self) -> dict:
        return {
            "rows_in": self.rows_in,
            "kept": self.kept,
            "dropped": self.dropped,
            "dropped_missing": self.dropped_missing,
            "dropped_nonpositive": self.dropped_nonpositive,
            "dropped_nonpositive_dates": list(self.dropped_nonpositive_dates),
            "rule": "rows with a missing value or a price <= 0 are dropped",
        }


@dataclass(frozen=True)
class PriceSeries:
    """Strictly date-increasing series of positive prices."""

    dates: np.ndarray  # datetime64[D]
    prices: np.ndarray
    source_id: str = ""
    report: CleaningReport | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.dates) != len(self.prices):
            raise ValueError("dates and prices differ in length")
        if len(self.prices) < 2:
            raise TooShort(f"a price series needs at least 2 points, got {len(self.prices)}")
        if np.any(np.diff(self.dates) <= np.timedelta64(0, "D")):
            raise NonMonotonicDates("price dates must be strictly increasing")
        if not np.all(np.isfinite(self.prices)) or np.any(self.prices <= 0):
            raise ValueError("prices must be finite and positive")

    @property
    def values(self) -> np.ndarray:
        return self.prices

    def __len__(self):
        return len(self.prices)


def _as_text(data) -> str:
    if isinstance(data, (bytes, bytearray)):
        return bytes(data).decode("utf-8-sig")
    if isinstance(data, str):
        return data.lstrip("﻿")
    return _as_text(data.read())


def _parse_date(text: str, line: int) -> _dt.date:
    try:
        return _dt.date.fromisoformat(text.strip())
    except ValueError:
        raise MalformedRow(line, f"unparseable date {text!r}") from None


def _parse_value(text: str, line: int) -> float | None:
    text = text.strip()
    if text in MISSING_MARKERS:
        return None
    try:
        value = float(text)
    except ValueError:
        raise MalformedRow(line, f"unparseable value {text!r}") from None
    if not math.isfinite(value):
        raise MalformedRow(line, f"non-finite value {text!r}")
    return value


def parse_fred_csv(data) -> list[RawObservation]:
    """Parse a FRED two-column CSV into raw observations.

    ``data`` may be bytes, str or a binary/text file object.  Raises
    `MalformedRow` (with a 1-based line number) for a row that does not have
    exactly two fields or has a bad date, and `EmptyFile` when there are no
    data rows.
    """
    lines = _as_text(data).splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise EmptyFile("file is empty")
    if len(lines[0].split(",")) != 2:
        raise MalformedRow(1, "header must have exactly two columns")
    out = []
    for lineno, row in enumerate(lines[1:], start=2):
        fields = row.split(",")
        if len(fields) != 2:
            raise MalformedRow(lineno, f"expected 2 fields, found {len(fields)}")
        out.append(RawObservation(_parse_date(fields[0], lineno), _parse_value(fields[1], lineno)))
    if not out:
        raise EmptyFile("file has a header but no data rows")
    return out


def read_fred_csv(path) -> list[RawObservation]:
    try:
        with open(path, "rb") as fh:
            return parse_fred_csv(fh.read())
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror or exc}") from exc


def fetch_fred(series_id: str = "DCOILWTICO", timeout: float = 30.0) -> list[RawObservation]:
    """Download a series from FRED and parse it (requires network access)."""
    url = FRED_URL.format(series_id=series_id)
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            return parse_fred_csv(resp.read())
    except OSError as exc:
        raise IoFailure(f"cannot fetch {url}: {exc}") from exc


def clean_series(raw, source_id: str = "") -> PriceSeries:
    """Drop missing and non-positive rows and build a `PriceSeries`.

    The returned series carries a `CleaningReport` in ``.report``.
    """
    raw = list(raw)
    if not raw:
        raise TooShort("no observations to clean")
    dates, prices, neg_dates = [], [], []
    n_missing = 0
    for obs in raw:
        if obs.value is None:
            n_missing += 1
        elif obs.value <= 0:
            neg_dates.append(obs.date.isoformat())
        else:
            if dates and obs.date <= dates[-1]:
                raise NonMonotonicDates(f"{obs.date.isoformat()} does not follow {dates[-1].isoformat()}")
            dates.append(obs.date)
            prices.append(obs.value)
    if len(prices) < 2:
        raise TooShort(f"only {len(prices)} usable price(s) after cleaning")
    report = CleaningReport(
        rows_in=len(raw),
        kept=len(prices),
        dropped_missing=n_missing,
        dropped_nonpositive=len(neg_dates),
        dropped_nonpositive_dates=tuple(neg_dates),
    )
    return PriceSeries(
        dates=np.array(dates, dtype="datetime64[D]"),
        prices=np.asarray(prices, dtype=float),
        source_id=source_id,
        report=report,
    )


def load_prices(path) -> PriceSeries:
    """Read and clean a FRED-format file; the series id is taken from the header."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror or exc}") from exc
    header = _as_text(blob).split("\n", 1)[0].strip()
    source_id = header.split(",")[-1] if "," in header else ""
    return clean_series(parse_fred_csv(blob), source_id=source_id)


def format_value(value) -> str:
    """Render a number with 10 significant digits; None/NaN render as ``.``."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "."
    return f"{float(value):#.10g}"


def _format_date(d) -> str:
    return str(np.datetime64(d, "D"))


def atomic_write_text(destination, text: str) -> None:
    """Write ``text`` to ``destination`` through a temp file and rename."""
    destination = os.fspath(destination)
    folder = os.path.dirname(os.path.abspath(destination))
    try:
        fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(destination))
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, destination)
    except OSError as exc:
        raise IoFailure(f"cannot write {destination}: {exc.strerror or exc}") from exc


def series_to_csv_text(dates, values, extra_columns: dict | None = None) -> str:
    extra_columns = extra_columns or {}
    names = ["date", "value", *extra_columns]
    buf = io.StringIO()
    buf.write(",".join(names) + "\n")
    columns = []
    for name in extra_columns:
        col = np.asarray(extra_columns[name])
        if len(col) != len(values):
            raise ValueError(f"extra column {name!r} has the wrong length")
        columns.append([str(int(v)) for v in col] if col.dtype.kind in "biu" else [format_value(v) for v in col.tolist()])
    for k, (d, v) in enumerate(zip(dates, values)):
        row = [_format_date(d), format_value(v), *(col[k] for col in columns)]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def write_series_csv(series, destination, extra_columns: dict | None = None) -> None:
    """Write any dated numeric sequence as a ``date,value`` CSV.

    ``series`` is either an object with ``dates`` and ``values`` attributes or
    a ``(dates, values)`` pair.  Extra columns (e.g. a ``defined`` flag) are
    appended in the given order.
    """
    if isinstance(series, tuple):
        dates, values = series
    else:
        dates, values = series.dates, series.values
    if len(dates) != len(values):
        raise ValueError("dates and values differ in length")
    atomic_write_text(destination, series_to_csv_text(dates, values, extra_columns))


def read_series_csv(path):
    """Read a CSV written by `write_series_csv`.

    Returns ``(dates, values, extras)`` where missing values are NaN and
    ``extras`` maps each extra column name to a float array.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not lines:
        raise EmptyFile(f"{path} is empty")
    names = lines[0].split(",")
    if len(names) < 2:
        raise MalformedRow(1, "header must have at least two columns")
    dates, cols = [], [[] for _ in names[1:]]
    for lineno, row in enumerate(lines[1:], start=2):
        fields = row.split(",")
        if len(fields) != len(names):
            raise MalformedRow(lineno, f"expected {len(names)} fields, found {len(fields)}")
        dates.append(_parse_date(fields[0], lineno))
        for col, text in zip(cols, fields[1:]):
            v = _parse_value(text, lineno)
            col.append(np.nan if v is None else v)
    dates = np.array(dates, dtype="datetime64[D]")
    values = np.asarray(cols[0], dtype=float)
    extras = {name: np.asarray(col, dtype=float) for name, col in zip(names[2:], cols[1:])}
    return dates, values, extras
