import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entrovol.entropy import (
    Absolute,
    RelativeToStd,
    SampEnParams,
    chebyshev_distance,
    count_matches,
    rolling_sample_entropy,
    sample_entropy,
    sample_entropy_naive,
)
from entrovol.errors import DegenerateTolerance, LengthMismatch, SeriesTooShort
from entrovol.series import RollingConfig

ALTERNATING = [1.0, 2.0] * 5

# Dyadic values (k / 64, |k| < 2**10): sums, differences and power-of-two
# scalings are exact in binary floating point.
dyadic = st.integers(-1023, 1023).map(lambda k: k / 64.0)
dyadic_windows = st.lists(dyadic, min_size=4, max_size=40)


def random_cases(n_cases=200, seed=7):
    rng = np.random.default_rng(seed)
    for _ in range(n_cases):
        n = int(rng.integers(5, 61))
        m = int(rng.integers(1, 4))
        fraction = float(rng.choice([0.1, 0.2, 0.5]))
        kind = rng.integers(3)
        if kind == 0:
            x = rng.normal(size=n)
        elif kind == 1:
            x = rng.integers(0, 4, n).astype(float)  # many exact ties
        else:
            x = np.cumsum(rng.normal(size=n))
        if np.std(x) == 0:
            x[0] += 1.0
        yield x, SampEnParams(m, RelativeToStd(fraction))


def test_chebyshev_examples():
    assert chebyshev_distance([1, 5, 2], [2, 3, 2]) == 2
    assert chebyshev_distance([0.3, -1.0], [0.3, -1.0]) == 0


def test_chebyshev_length_mismatch():
    with pytest.raises(LengthMismatch):
        chebyshev_distance([1, 2], [1])
    with pytest.raises(LengthMismatch):
        chebyshev_distance([], [])


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(*[st.lists(dyadic, min_size=n, max_size=n)] * 3)))
def test_chebyshev_metric_properties(triple):
    u, v, w = triple
    assert chebyshev_distance(u, v) == chebyshev_distance(v, u)
    assert chebyshev_distance(u, w) <= chebyshev_distance(u, v) + chebyshev_distance(v, w)


def test_alternating_counts():
    c = count_matches(ALTERNATING, 2, 0.5)
    assert (c.b_pairs, c.a_pairs, c.templates) == (24, 24, 8)
    naive = sample_entropy_naive(ALTERNATING, SampEnParams(2, Absolute(0.5)))
    assert naive.counts == c
    assert sample_entropy(ALTERNATING, SampEnParams(2, Absolute(0.5))).value == 0.0


@pytest.mark.parametrize("m", [1, 2, 3])
def test_constant_window(m):
    n = 20
    c = count_matches(np.full(n, 3.3), m, 0.01)
    assert c.a_pairs == c.b_pairs == (n - m) * (n - m - 1)
    assert sample_entropy(np.full(n, 3.3), SampEnParams(m, Absolute(0.01))).value == 0.0


def test_constant_window_relative_tolerance_is_degenerate():
    with pytest.raises(DegenerateTolerance):
        sample_entropy(np.zeros(10))


def test_too_short():
    with pytest.raises(SeriesTooShort):
        sample_entropy([1.0, 2.0, 3.0], SampEnParams(2, Absolute(1.0)))
    with pytest.raises(SeriesTooShort):
        sample_entropy_naive([1.0, 2.0, 3.0], SampEnParams(2, Absolute(1.0)))


def test_invalid_params():
    with pytest.raises(ValueError):
        SampEnParams(0)
    with pytest.raises(ValueError):
        Absolute(0.0)
    with pytest.raises(ValueError):
        RelativeToStd(-0.2)


def test_undefined_when_no_matches():
    res = sample_entropy(np.arange(10.0), SampEnParams(2, Absolute(0.5)))
    assert res.value is None and not res.defined
    assert res.counts.b_pairs == 0


def test_oracle_equivalence_200_random_series():
    for x, params in random_cases():
        fast = sample_entropy(x, params)
        slow = sample_entropy_naive(x, params)
        assert fast.counts == slow.counts
        assert fast.effective_r == slow.effective_r
        if slow.value is None:
            assert fast.value is None
        else:
            assert abs(fast.value - slow.value) <= 1e-12


def test_closed_ball_ties_count():
    # distance between the two templates is exactly r
    c = count_matches([0.0, 0.5, 0.0, 0.5], 1, 0.5)
    assert c.b_pairs == 6 and c.a_pairs == 6


def test_known_value_by_hand():
    # m=1, r=0.5 on [0, 0, 1, 0]: templates 0,0,1 (first three points).
    # length-1 matches among {0,0,1}: (0,1),(1,0) -> b = 2
    # length-2 templates (0,0),(0,1),(1,0): no pair within 0.5 -> a = 0
    res = sample_entropy_naive([0.0, 0.0, 1.0, 0.0], SampEnParams(1, Absolute(0.5)))
    assert (res.counts.b_pairs, res.counts.a_pairs) == (2, 0)
    assert res.value is None
    # [0, 0, 0, 1]: length-1 all three zero -> b = 6; length-2 (0,0),(0,0),(0,1) -> a = 2
    res = sample_entropy([0.0, 0.0, 0.0, 1.0], SampEnParams(1, Absolute(0.5)))
    assert (res.counts.b_pairs, res.counts.a_pairs) == (6, 2)
    assert res.value == pytest.approx(math.log(3.0), abs=1e-15)


@settings(max_examples=150, deadline=None)
@given(dyadic_windows, st.integers(1, 3), st.integers(1, 64).map(lambda k: k / 16.0))
def test_count_invariants(window, m, r):
    if len(window) < m + 2:
        window = window + [0.0] * (m + 2 - len(window))
    c = count_matches(window, m, r)
    assert 0 <= c.a_pairs <= c.b_pairs <= c.templates * (c.templates - 1)
    assert c.a_pairs % 2 == 0 and c.b_pairs % 2 == 0  # ordered pairs come in twos
    res = sample_entropy(window, SampEnParams(m, Absolute(r)))
    assert (res.value is None) == (c.a_pairs == 0 or c.b_pairs == 0)
    if res.value is not None:
        assert res.value >= 0.0


@settings(max_examples=150, deadline=None)
@given(dyadic_windows, st.integers(1, 3), st.integers(1, 32).map(lambda k: k / 16.0), dyadic)
def test_translation_invariance_exact(window, m, r, c):
    if len(window) < m + 2:
        return
    params = SampEnParams(m, Absolute(r))
    base = sample_entropy(window, params)
    shifted = sample_entropy([v + c for v in window], params)
    assert shifted.counts == base.counts
    assert shifted.value == base.value


@settings(max_examples=150, deadline=None)
@given(dyadic_windows, st.integers(1, 3), st.integers(1, 32).map(lambda k: k / 16.0), st.integers(-6, 6))
def test_scale_covariance_exact(window, m, r, power):
    if len(window) < m + 2:
        return
    c = 2.0**power
    base = sample_entropy(window, SampEnParams(m, Absolute(r)))
    scaled = sample_entropy([c * v for v in window], SampEnParams(m, Absolute(c * r)))
    assert scaled.counts == base.counts
    assert scaled.value == base.value
    if np.std(window) > 0:
        rel = SampEnParams(m, RelativeToStd(0.2))
        assert sample_entropy([c * v for v in window], rel).counts == sample_entropy(window, rel).counts


@settings(max_examples=100, deadline=None)
@given(dyadic_windows, st.integers(1, 3), st.integers(1, 32), st.integers(0, 32))
def test_counts_monotone_in_r(window, m, k, extra):
    if len(window) < m + 2:
        return
    lo = count_matches(window, m, k / 16.0)
    hi = count_matches(window, m, (k + extra) / 16.0)
    assert hi.b_pairs >= lo.b_pairs and hi.a_pairs >= lo.a_pairs


def test_scale_invariance_relative_tolerance_random(rng):
    x = rng.normal(size=200)
    base = sample_entropy(x)
    for c in (1e-3, 0.5, 7.0, 1e4):
        assert sample_entropy(c * x).value == pytest.approx(base.value, abs=1e-12)


def test_rolling_repeated_window_identical(rng):
    block = rng.normal(size=60)
    x = np.concatenate([block, rng.normal(size=17), block])
    dates = np.arange(x.size).astype("datetime64[D]")
    out = rolling_sample_entropy((dates, x), RollingConfig(60, 1))
    assert out.values[0] == out.values[-1]
    assert len(out) == x.size - 59


def test_rolling_marks_constant_and_undefined_windows():
    x = np.concatenate([np.zeros(30), np.arange(10.0)])
    dates = np.arange(x.size).astype("datetime64[D]")
    out = rolling_sample_entropy((dates, x), RollingConfig(20, 5))
    # first three windows are constant: relative tolerance degenerate
    assert out.defined.tolist()[:3] == [False, False, False]
    assert np.all(np.isnan(out.values[~out.defined]))
    assert np.all(out.values[out.defined] >= 0)
    np.testing.assert_allclose(out.extra["effective_r"][3:], [0.2 * np.std(x[s : s + 20], ddof=1) for s in range(15, 25, 5)])


def test_rolling_threads_match_serial(rng):
    x = rng.normal(size=400)
    dates = np.arange(x.size).astype("datetime64[D]")
    a = rolling_sample_entropy((dates, x), RollingConfig(100, 7))
    b = rolling_sample_entropy((dates, x), RollingConfig(100, 7), workers=3)
    np.testing.assert_array_equal(a.values, b.values)


def test_rolling_width_below_minimum():
    with pytest.raises(SeriesTooShort):
        rolling_sample_entropy((np.arange(10).astype("datetime64[D]"), np.arange(10.0)), RollingConfig(3, 1))
