import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planta.calibration import CalibrationTable, Extrapolation, linear_table
from planta.errors import EmptyGridError, NonPositiveError, UnitError
from planta.meg import (
    DISC_5MM_AREA,
    EfficiencyInputs,
    MegConfig,
    default_voc_table,
    evaporation_efficiency,
    find_mpp,
    open_circuit_voltage,
    operating_point,
    power_density,
)


def fixed_voc_config(voc: float, r_int: float = 20.0) -> MegConfig:
    # flat-ish table: same voltage across the band (strictly monotone by epsilon)
    table = CalibrationTable((0.0, 100.0), (voc, voc + 1e-15))
    return MegConfig(voc_vs_rh=table, internal_resistance=r_int)


def test_default_table_sensitivity_delta():
    cfg = MegConfig()
    assert open_circuit_voltage(cfg, 60.0) - open_circuit_voltage(cfg, 50.0) == \
        pytest.approx(0.042, rel=1e-9)


def test_voc_anchor_at_band_floor():
    cfg = MegConfig(voc_vs_rh=default_voc_table(anchor_voltage=0.2))
    assert open_circuit_voltage(cfg, 30.0) == pytest.approx(0.2, rel=1e-12)


def test_voc_rejects_rh_outside_unit_domain():
    with pytest.raises(UnitError):
        open_circuit_voltage(MegConfig(), 120.0)


def test_thickness_gain_saturation_plateau():
    gain = CalibrationTable((50e-9, 145e-9), (0.6, 1.0), Extrapolation.CLAMP)
    at_knee = MegConfig(thickness_gain=gain, membrane_thickness=145e-9)
    beyond = MegConfig(thickness_gain=gain, membrane_thickness=500e-9)
    assert open_circuit_voltage(at_knee, 60.0) == open_circuit_voltage(beyond, 60.0)
    thin = MegConfig(thickness_gain=gain, membrane_thickness=50e-9)
    assert open_circuit_voltage(thin, 60.0) < open_circuit_voltage(at_knee, 60.0)


def test_thickness_gain_validation():
    too_big = CalibrationTable((1.0, 2.0), (0.9, 1.5), Extrapolation.CLAMP)
    with pytest.raises(NonPositiveError):
        MegConfig(thickness_gain=too_big, membrane_thickness=1.5)
    decreasing = CalibrationTable((1.0, 2.0), (1.0, 0.5), Extrapolation.CLAMP)
    with pytest.raises(NonPositiveError):
        MegConfig(thickness_gain=decreasing, membrane_thickness=1.5)


def test_operating_point_short_and_open_circuit():
    cfg = fixed_voc_config(0.06)
    short = operating_point(cfg, 60.0, 0.0)
    assert short.voltage == 0.0
    assert short.current == pytest.approx(0.06 / 20.0, rel=1e-12)
    opened = operating_point(cfg, 60.0, math.inf)
    assert opened.voltage == pytest.approx(0.06, rel=1e-12)
    assert opened.current == 0.0
    # at a large finite load V*I < Voc*I (strict below the open-circuit limit)
    big = operating_point(cfg, 60.0, 1e9)
    assert big.power <= 0.06 * big.current


def test_operating_point_matched_load_worked_example():
    cfg = fixed_voc_config(0.06, 20.0)
    pt = operating_point(cfg, 60.0, 20.0)
    assert pt.voltage == pytest.approx(0.030, rel=1e-9)
    assert pt.current == pytest.approx(0.0015, rel=1e-9)
    assert pt.power == pytest.approx(45e-6, rel=1e-9)


def test_find_mpp_returns_internal_resistance():
    cfg = fixed_voc_config(0.06, 20.0)
    load, power = find_mpp(cfg, 60.0, [5.0, 10.0, 20.0, 40.0, 80.0])
    assert load == 20.0
    voc = open_circuit_voltage(cfg, 60.0)
    assert power == pytest.approx(voc * voc / (4 * 20.0), rel=1e-12)


def test_find_mpp_tie_and_errors():
    cfg = fixed_voc_config(0.06)
    assert find_mpp(cfg, 60.0, [20.0, 20.0])[0] == 20.0
    with pytest.raises(EmptyGridError):
        find_mpp(cfg, 60.0, [])
    with pytest.raises(NonPositiveError):
        find_mpp(cfg, 60.0, [10.0, -5.0])


@given(st.floats(1.0, 500.0),
       st.lists(st.floats(0.5, 2000.0), min_size=1, max_size=12))
@settings(max_examples=150)
def test_find_mpp_matches_brute_force(r_int, grid):
    cfg = fixed_voc_config(0.1, r_int)
    load, power = find_mpp(cfg, 50.0, grid)
    # independent oracle: direct scan of the Thevenin formula, same tie rule
    best = None
    for r in sorted(grid):
        p = (0.1 / (r + r_int)) ** 2 * r
        if best is None or p > best[1]:
            best = (r, p)
    assert load == best[0]
    assert power == pytest.approx(best[1], rel=1e-9)
    assert all(power >= (0.1 / (r + r_int)) ** 2 * r * (1 - 1e-12) for r in grid)
    # unimodal and log-symmetric: the winner is the log-nearest grid point
    # (checked only when the tie is decisive)
    dists = sorted(abs(math.log(r / r_int)) for r in grid)
    if len(dists) == 1 or dists[1] - dists[0] > 1e-6:
        want = min(sorted(grid), key=lambda r: abs(math.log(r / r_int)))
        assert load == want


def test_voc_monotone_in_rh():
    cfg = MegConfig()
    vs = [open_circuit_voltage(cfg, rh) for rh in range(30, 91)]
    assert all(b > a for a, b in zip(vs, vs[1:]))


def test_power_density_reference_point():
    cfg = MegConfig()
    dens = power_density(21.874e-9, cfg)
    # 21.874 nW over the 5 mm disc -> 0.1114 uW/cm^2
    assert dens * 100.0 == pytest.approx(0.1114, abs=1e-4)
    assert power_density(0.0, cfg) == 0.0
    half = MegConfig(active_area=2 * DISC_5MM_AREA)
    assert power_density(1e-6, half) == pytest.approx(power_density(1e-6, cfg) / 2)
    with pytest.raises(NonPositiveError):
        power_density(-1.0, cfg)


def test_efficiency_procedure():
    inp = EfficiencyInputs(output_energy=0.0589, evaporated_mass=0.415)
    # independent arithmetic: (0.415 / 18.015) mol * 44 kJ/mol
    expect_input = 0.415 / 18.015 * 44000.0
    assert inp.input_energy() == pytest.approx(expect_input, rel=1e-12)
    assert abs(inp.input_energy() - 1013.6) < 0.5
    eff = evaporation_efficiency(inp)
    assert eff == pytest.approx(0.0589 / expect_input, rel=1e-12)
    assert abs(eff - 5.811e-5) < 1e-7


def test_efficiency_identity_and_validation():
    inp = EfficiencyInputs(output_energy=1013.5997779628087, evaporated_mass=0.415)
    assert evaporation_efficiency(inp) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(NonPositiveError):
        EfficiencyInputs(output_energy=0.0, evaporated_mass=0.415)


def test_efficiency_unit_rescaling_invariance():
    base = EfficiencyInputs(0.0589, 0.415)
    # express output and heat in kJ instead of J
    scaled = EfficiencyInputs(0.0589e-3, 0.415, heat_of_evaporation=44.0)
    assert evaporation_efficiency(scaled) == pytest.approx(
        evaporation_efficiency(base), rel=1e-12)
