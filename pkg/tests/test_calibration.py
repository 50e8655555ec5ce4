import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planta.calibration import (
    CalibrationTable,
    Extrapolation,
    linear_table,
    read_table_csv,
    write_table_csv,
)
from planta.errors import NonMonotonicError, OutOfDomainError, OutOfRangeError, ParseError

RH_LINE = CalibrationTable((0.0, 100.0), (0.0, 0.42), Extrapolation.ERROR)


def test_eval_exact_at_knots():
    assert RH_LINE.eval(0.0) == 0.0
    assert RH_LINE.eval(100.0) == 0.42


def test_eval_midpoint():
    assert RH_LINE.eval(50.0) == pytest.approx(0.21, abs=1e-15)


def test_eval_out_of_domain_errors():
    with pytest.raises(OutOfDomainError):
        RH_LINE.eval(120.0)
    with pytest.raises(OutOfDomainError):
        RH_LINE.eval(-1.0)


def test_eval_clamp_and_linear_extend():
    clamp = RH_LINE.with_policy(Extrapolation.CLAMP)
    assert clamp.eval(120.0) == 0.42
    assert clamp.eval(-10.0) == 0.0
    lin = RH_LINE.with_policy(Extrapolation.LINEAR)
    assert lin.eval(120.0) == pytest.approx(0.42 * 1.2, rel=1e-12)
    assert lin.eval(-50.0) == pytest.approx(-0.21, rel=1e-12)


def test_invert_endpoints_and_midpoint():
    assert RH_LINE.invert(0.42) == 100.0
    assert RH_LINE.invert(0.21) == pytest.approx(50.0, abs=1e-12)
    with pytest.raises(OutOfRangeError):
        RH_LINE.invert(0.5)


def test_roundtrip_many_random_stimuli():
    rng = np.random.default_rng(7)
    for x in rng.uniform(0.0, 100.0, 1000):
        y = RH_LINE.eval(float(x))
        assert RH_LINE.invert(y) == pytest.approx(float(x), abs=1e-10)
    y = RH_LINE.eval(37.5)
    assert RH_LINE.invert(y) == pytest.approx(37.5, abs=1e-12)


def test_decreasing_table_inverts():
    # NTC-style response
    t = CalibrationTable((0.0, 50.0, 100.0), (10.0, 6.0, 1.0))
    assert not t.increasing
    assert t.invert(10.0) == 0.0
    assert t.invert(1.0) == 100.0
    assert t.invert(6.0) == pytest.approx(50.0, abs=1e-12)
    assert t.eval(t.invert(3.5)) == pytest.approx(3.5, rel=1e-12)


@st.composite
def monotone_tables(draw):
    n = draw(st.integers(min_value=2, max_value=8))
    xs = draw(st.lists(st.floats(-50, 50, allow_nan=False), min_size=n, max_size=n,
                       unique=True))
    xs = sorted(xs)
    steps = draw(st.lists(st.floats(1e-3, 10.0), min_size=n - 1, max_size=n - 1))
    direction = draw(st.sampled_from([1.0, -1.0]))
    y0 = draw(st.floats(-5, 5))
    ys = [y0]
    for s in steps:
        ys.append(ys[-1] + direction * s)
    return CalibrationTable(tuple(xs), tuple(ys))


@given(monotone_tables(), st.floats(0.0, 1.0))
@settings(max_examples=150)
def test_property_roundtrip_within_range(table, frac):
    lo, hi = table.range
    y = lo + frac * (hi - lo)
    x = table.invert(y)
    back = table.eval(x)
    assert abs(back - y) <= 1e-12 * abs(y) + 1e-12


@given(monotone_tables(), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
@settings(max_examples=150)
def test_property_eval_monotone(table, f1, f2):
    lo, hi = table.domain
    x1 = lo + min(f1, f2) * (hi - lo)
    x2 = lo + max(f1, f2) * (hi - lo)
    y1, y2 = table.eval(x1), table.eval(x2)
    if table.increasing:
        assert y1 <= y2 + 1e-12 * (abs(y1) + 1)
    else:
        assert y1 >= y2 - 1e-12 * (abs(y1) + 1)


def test_construction_rejects_bad_tables():
    with pytest.raises(NonMonotonicError):
        CalibrationTable((0.0,), (1.0,))
    with pytest.raises(NonMonotonicError):
        CalibrationTable((0.0, 0.0), (1.0, 2.0))
    with pytest.raises(NonMonotonicError):
        CalibrationTable((0.0, 1.0, 2.0), (1.0, 3.0, 2.0))
    with pytest.raises(NonMonotonicError):
        CalibrationTable((0.0, 1.0), (1.0, 1.0))


def test_linear_table_builder():
    t = linear_table(30.0, 90.0, 0.15, 0.402, knots=7)
    assert len(t.stimulus) == 7
    assert t.eval(60.0) == pytest.approx(0.276, rel=1e-12)


def test_csv_roundtrip(tmp_path):
    t = CalibrationTable((1.0, 2.5, 7.0), (0.1, 0.4, 0.9),
                         stimulus_unit="pct_rh", response_unit="V")
    p = tmp_path / "table.csv"
    write_table_csv(t, p)
    back = read_table_csv(p)
    assert back.stimulus == t.stimulus
    assert back.response == t.response
    assert back.stimulus_unit == "pct_rh"
    assert back.response_unit == "V"


def test_csv_rejects_bad_header_and_units(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,c,d\n1,2,x,y\n")
    with pytest.raises(ParseError):
        read_table_csv(p)
    p.write_text("stimulus,response,unit_stimulus,unit_response\n"
                 "1,2,V,ohm\n2,3,mV,ohm\n")
    with pytest.raises(ParseError):
        read_table_csv(p)
    p.write_text("stimulus,response,unit_stimulus,unit_response\n")
    with pytest.raises(ParseError):
        read_table_csv(p)
