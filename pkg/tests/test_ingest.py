import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entrovol.errors import EmptyFile, MalformedRow, NonMonotonicDates, TooShort
from entrovol.ingest import (
    RawObservation,
    clean_series,
    load_prices,
    parse_fred_csv,
    read_series_csv,
    write_series_csv,
)

D1, D2, D3 = dt.date(2020, 4, 17), dt.date(2020, 4, 20), dt.date(2020, 4, 21)


def test_parse_single_row():
    assert parse_fred_csv(b"DATE,DCOILWTICO\n1986-01-02,25.56\n") == [RawObservation(dt.date(1986, 1, 2), 25.56)]


def test_parse_missing_marker():
    assert parse_fred_csv("DATE,X\n2020-01-01,.\n") == [RawObservation(dt.date(2020, 1, 1), None)]
    assert parse_fred_csv("DATE,X\n2020-01-01,\n")[0].value is None


def test_parse_wrong_field_count_reports_line():
    with pytest.raises(MalformedRow) as err:
        parse_fred_csv("DATE,X\n2020-01-01\n")
    assert err.value.line == 2


def test_parse_bad_date_reports_line():
    with pytest.raises(MalformedRow) as err:
        parse_fred_csv("DATE,X\n2020-01-01,1\n2020-13-01,2\n")
    assert err.value.line == 3


@pytest.mark.parametrize("text", ["", "DATE,X\n", "DATE,X\n\n\n"])
def test_parse_empty(text):
    with pytest.raises(EmptyFile):
        parse_fred_csv(text)


def test_parse_ignores_trailing_blank_lines_and_bom():
    rows = parse_fred_csv("﻿DATE,X\r\n2020-01-01,1.5\r\n\r\n".encode())
    assert rows == [RawObservation(dt.date(2020, 1, 1), 1.5)]


def test_clean_drops_missing():
    s = clean_series([RawObservation(D1, 10.0), RawObservation(D2, None), RawObservation(D3, 11.0)])
    assert s.prices.tolist() == [10.0, 11.0]
    assert s.dates.tolist() == [D1, D3]
    assert s.report.dropped == 1
    assert s.report.dropped_missing == 1


def test_clean_drops_negative_print():
    # 2020-04-20 WTI settled at -37.63
    raw = [RawObservation(D1, 18.31), RawObservation(D2, -37.63), RawObservation(D3, 8.91)]
    s = clean_series(raw)
    assert s.prices.tolist() == [18.31, 8.91]
    assert s.report.dropped_nonpositive == 1
    assert s.report.dropped_nonpositive_dates == ("2020-04-20",)


def test_clean_too_short():
    with pytest.raises(TooShort):
        clean_series([RawObservation(D1, 10.0), RawObservation(D2, -37.63)])


def test_clean_non_monotonic():
    with pytest.raises(NonMonotonicDates):
        clean_series([RawObservation(D2, 1.0), RawObservation(D1, 2.0)])


def test_clean_idempotent(synthetic_fred):
    once = load_prices(synthetic_fred)
    twice = clean_series([RawObservation(d.item(), float(p)) for d, p in zip(once.dates, once.prices)])
    assert twice.report.dropped == 0
    np.testing.assert_array_equal(once.prices, twice.prices)


def test_write_format(tmp_path):
    path = tmp_path / "s.csv"
    write_series_csv((np.array(["1986-01-02"], dtype="datetime64[D]"), np.array([0.5])), path)
    assert path.read_text() == "date,value\n1986-01-02,0.5000000000\n"


def test_write_empty(tmp_path):
    path = tmp_path / "s.csv"
    write_series_csv((np.array([], dtype="datetime64[D]"), np.array([])), path)
    assert path.read_text() == "date,value\n"


def test_write_extra_columns(tmp_path):
    path = tmp_path / "s.csv"
    dates = np.array(["2000-01-03", "2000-01-04"], dtype="datetime64[D]")
    write_series_csv((dates, np.array([1.0, np.nan])), path, {"defined": np.array([1, 0])})
    assert path.read_text() == "date,value,defined\n2000-01-03,1.000000000,1\n2000-01-04,.,0\n"
    d, v, extra = read_series_csv(path)
    assert np.isnan(v[1]) and extra["defined"].tolist() == [1.0, 0.0]


def test_round_trip_100_random_points(tmp_path, rng):
    dates = np.datetime64("1990-01-01") + np.sort(rng.choice(20000, 100, replace=False)).astype("timedelta64[D]")
    values = rng.normal(0, 1, 100) * 10.0 ** rng.integers(-8, 4, 100)
    path = tmp_path / "s.csv"
    write_series_csv((dates, values), path)
    parsed = parse_fred_csv(path.read_bytes())
    assert [o.date for o in parsed] == dates.tolist()
    np.testing.assert_allclose([o.value for o in parsed], values, rtol=5e-10, atol=0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, min_value=-1e12, max_value=1e12), min_size=0, max_size=30))
def test_round_trip_property(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("rt") / "s.csv"
    dates = np.datetime64("2000-01-01") + np.arange(len(values)).astype("timedelta64[D]")
    write_series_csv((dates, np.array(values, dtype=float)), path)
    d, v, _ = read_series_csv(path)
    assert d.tolist() == dates.tolist()
    np.testing.assert_allclose(v, values, rtol=5e-10, atol=1e-300)
