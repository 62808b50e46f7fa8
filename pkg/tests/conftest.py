import os
from pathlib import Path

import numpy as np
import pytest

from entrovol.synthetic import fred_csv_text, simulate_prices

WTI_ENV = "ENTROVOL_WTI_CSV"
WTI_DEFAULT = Path(__file__).parent / "data" / "DCOILWTICO.csv"

_criteria = []


def wti_path():
    candidate = os.environ.get(WTI_ENV)
    path = Path(candidate) if candidate else WTI_DEFAULT
    return path if path.exists() else None


@pytest.fixture(scope="session")
def wti_csv():
    path = wti_path()
    if path is None:
        pytest.skip(f"FRED DCOILWTICO file not found (set {WTI_ENV} or add {WTI_DEFAULT})")
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def synthetic_fred(tmp_path_factory):
    """A 600-point FRED-style file with two missing rows."""
    dates, prices = simulate_prices(600, seed=3, shock=(450, 500, 3.0))
    path = tmp_path_factory.mktemp("fred") / "synthetic.csv"
    path.write_text(fred_csv_text(dates, prices, missing=(10, 200)))
    return path


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label, text): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        _criteria.append((marker.args[0], status, marker.args[1]))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, text in sorted(_criteria, key=lambda c: c[0]):
        terminalreporter.write_line(f"[{status}] {label}: {text}")
