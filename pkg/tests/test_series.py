import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planta.errors import InsufficientDataError, ZeroMeanError
from planta.series import (
    TimeSeries,
    coefficient_of_variation,
    linear_trend,
    read_series_csv,
    write_series_csv,
)
from planta.units import SECONDS_PER_DAY

DAY = SECONDS_PER_DAY


def make(ts, vs, **kw):
    return TimeSeries(np.array(ts, dtype=float), np.array(vs, dtype=float), **kw)


def test_validation():
    with pytest.raises(ValueError):
        make([0, 0], [1, 2])
    with pytest.raises(ValueError):
        make([1, 0], [1, 2])
    with pytest.raises(ValueError):
        make([0, 1], [1, np.nan])
    s = make([0, 1, 2], [5, 6, 7], channel="x", unit="V")
    with pytest.raises(ValueError):
        s.values[0] = 0.0  # frozen


def test_interpolators():
    s = make([0.0, 10.0, 20.0], [0.0, 1.0, 3.0])
    assert s.sample_at(5.0) == pytest.approx(0.5)
    assert s.sample_at(15.0) == pytest.approx(2.0)
    assert s.value_at_hold(9.99) == 0.0
    assert s.value_at_hold(10.0) == 1.0
    assert s.value_at_hold(-5.0) == 0.0
    assert s.tail(10.0).times[0] == 10.0


def test_trend_constant_is_zero():
    s = make([0, DAY, 2 * DAY], [4.2, 4.2, 4.2])
    assert linear_trend(s, 3 * DAY) == 0.0


def test_trend_two_point_growth():
    # two-point slope is exactly (v1 - v0) / delta_days
    s = make([0.0, 39 * DAY], [6.43, 6.80])
    assert linear_trend(s, 40 * DAY) == pytest.approx((6.80 - 6.43) / 39.0, rel=1e-12)
    s = make([0.0, 39 * DAY], [6.87, 6.47])
    assert linear_trend(s, 40 * DAY) == pytest.approx((6.47 - 6.87) / 39.0, rel=1e-12)


def test_trend_window_and_insufficiency():
    s = make([0, DAY, 2 * DAY, 3 * DAY], [0.0, 0.0, 1.0, 2.0])
    # trailing 1.5-day window only sees the last two points
    assert linear_trend(s, 1.5 * DAY) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(InsufficientDataError):
        linear_trend(s, 0.5 * DAY)


@given(st.floats(-1e6, 1e6), st.floats(-1e3, 1e3))
@settings(max_examples=60)
def test_trend_translation_invariance(t_shift, v_shift):
    t = np.array([0.0, 0.3, 1.1, 2.0, 3.7]) * DAY
    v = np.array([1.0, 1.4, 0.9, 2.2, 2.5])
    base = linear_trend(TimeSeries(t, v), 5 * DAY)
    moved = linear_trend(TimeSeries(t + t_shift, v + v_shift), 5 * DAY)
    assert moved == pytest.approx(base, abs=1e-12 + 1e-12 * abs(base))


def test_cv_examples():
    assert coefficient_of_variation([1, 1, 1, 1]) == 0.0
    assert coefficient_of_variation([9, 10, 11]) == pytest.approx(0.1, rel=1e-12)
    with pytest.raises(InsufficientDataError):
        coefficient_of_variation([])
    with pytest.raises(InsufficientDataError):
        coefficient_of_variation([5.0])
    with pytest.raises(ZeroMeanError):
        coefficient_of_variation([-1.0, 1.0])


@given(st.floats(1e-6, 1e6))
@settings(max_examples=60)
def test_cv_scale_invariant(k):
    xs = [9.0, 10.0, 11.0, 10.5]
    assert coefficient_of_variation([k * x for x in xs]) == pytest.approx(
        coefficient_of_variation(xs), rel=1e-9)


def test_series_csv_roundtrip(tmp_path):
    s = make([0.0, 60.0, 120.0], [1.5, 1.25, 1.75], channel="air_temp_c", unit="degC")
    p = tmp_path / "s.csv"
    write_series_csv(s, p)
    back = read_series_csv(p, unit="degC")
    assert back.channel == "air_temp_c"
    assert np.array_equal(back.times, s.times)
    assert np.array_equal(back.values, s.values)
