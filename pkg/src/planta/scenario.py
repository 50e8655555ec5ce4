"""Synthetic end-to-end runs of the whole sensing suite.

A virtual plant (diurnal air temperature and humidity, a leaf microclimate
offset, and a condition-dependent growth trajectory) drives the generator
model, the intermittent power chain, the forward sensor models and the
ADC; the inverse pipelines and analytics then recover plant state exactly
as a field deployment would, sampled only at the instants the power chain
completed a reading.

Runs are deterministic: noise comes from a counter-based generator keyed
by the scenario seed, and identical (scenario, suite, seed) triples give
byte-identical output trees.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import report as report_mod
from .analytics import (
    StressCategory,
    StressConfig,
    StressLabel,
    VpdInputs,
    classify_stress,
    vapor_pressures,
)
from .calibration import CalibrationTable
from .errors import InvariantViolationError, ParseError
from .kirigami import (
    GaugeModel,
    StemGeometry,
    default_bending_table,
    diameter_from_reading,
    reading_from_diameter,
)
from .meg import MegConfig, open_circuit_voltage
from .powerchain import (
    PowerChainConfig,
    ReadingEvent,
    ledger_residual,
    simulate,
)
from .series import TimeSeries
from .transducers import (
    AdcModel,
    HumiditySensorModel,
    TempSensorModel,
    adc_read,
    code_to_voltage,
    divider_resistance,
    divider_voltage,
    resistance_to_temp,
    rh_from_meg_voltage,
    temp_to_resistance,
)
from .units import (
    CELSIUS,
    KPA,
    MILLIMETRE,
    PERCENT_RH,
    REL_RESISTANCE,
    SECONDS_PER_DAY,
    WATT,
)

#: truth humidity is kept inside the sensor's calibrated band with margin
RH_CLAMP = (32.0, 88.0)

#: diameters must stay in this window, mm
DIAMETER_BOUNDS = (3.0, 15.0)


class Condition(enum.Enum):
    HEALTHY = "healthy"
    WATER_STRESS = "water_stress"
    SALINITY_STRESS = "salinity_stress"


#: per-condition (initial diameter mm, growth mm/day, air RH drift %RH/day);
#: growth endpoints mirror the bundled 40-day stem dataset, the humidity
#: drift produces the matching VPD trend (rising under water deficit,
#: falling under salinity)
CONDITION_DEFAULTS: dict[Condition, tuple[float, float, float]] = {
    Condition.HEALTHY: (6.43, 0.0095, 0.0),
    Condition.WATER_STRESS: (6.87, -0.0103, -1.0),
    Condition.SALINITY_STRESS: (6.52, -0.0095, 1.0),
}

_LABEL_FOR_CONDITION = {
    Condition.HEALTHY: StressCategory.HEALTHY,
    Condition.WATER_STRESS: StressCategory.WATER_STRESS,
    Condition.SALINITY_STRESS: StressCategory.SALINITY_STRESS,
}


@dataclass(frozen=True)
class PlantScenario:
    """One virtual plant.

    The leaf microclimate offsets (cooler and moister than open air) are
    qualitative defaults, not measured values.  Growth fields left as None
    fall back to the condition defaults above.
    """

    duration_days: float = 14.0
    condition: Condition = Condition.HEALTHY
    seed: int = 0

    air_temp_mean_c: float = 25.0
    air_temp_swing_c: float = 4.0
    air_rh_mean_pct: float = 60.0
    air_rh_swing_pct: float = 10.0
    peak_hour: float = 14.0
    leaf_temp_offset_c: float = -1.5
    leaf_rh_offset_pct: float = 8.0
    sample_seconds: float = 600.0

    initial_diameter_mm: float | None = None
    growth_mm_per_day: float | None = None
    rh_drift_pct_per_day: float | None = None

    air_temp_sigma_c: float = 0.0
    air_rh_sigma_pct: float = 0.0
    diameter_sigma_mm: float = 0.0

    watering_times_s: tuple[float, ...] = ()
    salinity_dose_times_s: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.duration_days < 0:
            raise InvariantViolationError("duration_days must be >= 0")
        if self.sample_seconds <= 0:
            raise InvariantViolationError("sample_seconds must be > 0")

    @property
    def growth_params(self) -> tuple[float, float, float]:
        d0, slope, drift = CONDITION_DEFAULTS[self.condition]
        return (
            self.initial_diameter_mm if self.initial_diameter_mm is not None else d0,
            self.growth_mm_per_day if self.growth_mm_per_day is not None else slope,
            self.rh_drift_pct_per_day if self.rh_drift_pct_per_day is not None else drift,
        )


@dataclass
class RunOutput:
    """Everything one scenario run produces."""

    truth: dict[str, TimeSeries] = field(default_factory=dict)
    sensed: dict[str, TimeSeries] = field(default_factory=dict)
    digitized: dict[str, TimeSeries] = field(default_factory=dict)
    events: list[ReadingEvent] = field(default_factory=list)
    derived: dict[str, TimeSeries] = field(default_factory=dict)
    label: StressLabel | None = None
    report: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SuiteConfig:
    """Module configurations for an end-to-end run.

    `harvest_derating` scales the matched-load harvest power down to the
    net sub-microwatt level the real converter front end achieves at these
    source impedances (cold start, quiescent and tracking losses are not
    modelled individually); set it to 1.0 for ideal-converter studies.
    """

    meg: MegConfig = field(default_factory=MegConfig)
    power: PowerChainConfig = field(default_factory=PowerChainConfig)
    temp_sensor: TempSensorModel = field(default_factory=TempSensorModel)
    humidity: HumiditySensorModel = field(default_factory=HumiditySensorModel)
    adc: AdcModel = field(default_factory=AdcModel)
    gauge: GaugeModel = field(default_factory=GaugeModel)
    geometry: StemGeometry = field(default_factory=StemGeometry)
    bend_curve: CalibrationTable = field(default_factory=default_bending_table)
    stress: StressConfig = field(default_factory=StressConfig)
    harvest_derating: float = 1.2e-4
    source_voltage: float = 3.3


def default_suite() -> SuiteConfig:
    return SuiteConfig()


def generate(sc: PlantScenario) -> RunOutput:
    """Truth channels only: microclimate on the environment grid, stem
    diameter on a daily grid, plus the truth VPD."""
    out = RunOutput()
    duration_s = sc.duration_days * SECONDS_PER_DAY
    rng = np.random.Generator(np.random.Philox(sc.seed))
    t_env = np.arange(0.0, duration_s, sc.sample_seconds)
    d0_mm, slope_mm_day, drift = sc.growth_params

    hours = (t_env / 3600.0) % 24.0
    phase = np.cos(2.0 * math.pi * (hours - sc.peak_hour) / 24.0)
    # noise draw order is fixed (air temperature, air humidity, diameter) so
    # changing one sigma never reshuffles the other channels
    air_t = (sc.air_temp_mean_c + sc.air_temp_swing_c * phase
             + rng.normal(0.0, sc.air_temp_sigma_c, t_env.size))
    air_rh = (sc.air_rh_mean_pct - sc.air_rh_swing_pct * phase
              + drift * (t_env / SECONDS_PER_DAY)
              + rng.normal(0.0, sc.air_rh_sigma_pct, t_env.size))
    air_rh = np.clip(air_rh, *RH_CLAMP)
    leaf_t = air_t + sc.leaf_temp_offset_c
    leaf_rh = air_rh + sc.leaf_rh_offset_pct
    for tw in sc.watering_times_s:
        bump = np.where(t_env >= tw, 5.0 * np.exp(-(t_env - tw) / 7200.0), 0.0)
        leaf_rh = leaf_rh + bump
    leaf_rh = np.clip(leaf_rh, *RH_CLAMP)

    n_days = int(math.ceil(sc.duration_days))
    t_day = np.arange(n_days, dtype=float) * SECONDS_PER_DAY
    dia = (d0_mm + slope_mm_day * np.arange(n_days)
           + rng.normal(0.0, sc.diameter_sigma_mm, n_days))
    lo, hi = DIAMETER_BOUNDS
    if dia.size and (dia.min() <= lo or dia.max() >= hi):
        raise InvariantViolationError(
            f"diameter trajectory leaves ({lo}, {hi}) mm; adjust the scenario")

    vp_sat = 0.6107 * 10.0 ** (7.5 * leaf_t / (237.3 + leaf_t))
    vp_air = 0.6107 * 10.0 ** (7.5 * air_t / (237.3 + air_t)) * (air_rh / 100.0)

    out.truth = {
        "air_temp_c": TimeSeries(t_env, air_t, "air_temp_c", CELSIUS),
        "air_rh_pct": TimeSeries(t_env, air_rh, "air_rh_pct", PERCENT_RH),
        "leaf_temp_c": TimeSeries(t_env, leaf_t, "leaf_temp_c", CELSIUS),
        "leaf_rh_pct": TimeSeries(t_env, leaf_rh, "leaf_rh_pct", PERCENT_RH),
        "stem_diameter_mm": TimeSeries(t_day, dia, "stem_diameter_mm", MILLIMETRE),
        "vpd_kpa": TimeSeries(t_env, vp_sat - vp_air, "vpd_kpa", KPA),
    }
    return out


def harvest_profile(sc: PlantScenario, suite: SuiteConfig,
                    truth: dict[str, TimeSeries]) -> TimeSeries:
    """Matched-load harvest power of the leaf and open-air generators."""
    leaf = truth["leaf_rh_pct"]
    air = truth["air_rh_pct"]
    r_int = suite.meg.internal_resistance
    p = np.empty(len(leaf))
    for i in range(len(leaf)):
        v1 = open_circuit_voltage(suite.meg, float(leaf.values[i]))
        v2 = open_circuit_voltage(suite.meg, float(air.values[i]))
        p[i] = (v1 * v1 + v2 * v2) / (4.0 * r_int)
    return TimeSeries(leaf.times, suite.harvest_derating * p, "harvest_power", WATT)


def _measure(suite: SuiteConfig, truth: dict[str, TimeSeries],
             t_r: float) -> tuple[dict[str, float], dict[str, int]]:
    """One wake-up: forward-model every channel, digitize, invert."""
    adc_temp = replace(suite.adc, divider_fixed_resistor=suite.temp_sensor.r0)
    adc_strain = replace(suite.adc, divider_fixed_resistor=suite.gauge.r_baseline)
    src = suite.source_voltage
    codes: dict[str, int] = {}

    def temp_channel(name: str) -> float:
        t_true = truth[name].sample_at(t_r)
        r = temp_to_resistance(suite.temp_sensor, t_true)
        code = adc_read(suite.adc, divider_voltage(adc_temp, r, src)).code
        codes[name] = code
        return resistance_to_temp(suite.temp_sensor, divider_resistance(adc_temp, code, src))

    leaf_t = temp_channel("leaf_temp_c")
    air_t = temp_channel("air_temp_c")

    def rh_channel(name: str, temp_for_correction: float) -> float:
        rh_true = truth[name].sample_at(t_r)
        code = adc_read(suite.adc, suite.humidity.curve.eval(rh_true)).code
        codes[name] = code
        return rh_from_meg_voltage(suite.humidity, code_to_voltage(suite.adc, code),
                                   temp_for_correction).rh

    leaf_rh = rh_channel("leaf_rh_pct", leaf_t)
    air_rh = rh_channel("air_rh_pct", air_t)

    d_true_m = truth["stem_diameter_mm"].sample_at(t_r) * 1e-3
    y = reading_from_diameter(suite.geometry, d_true_m, suite.bend_curve)
    r_strain = suite.gauge.r_baseline * (1.0 + y)
    code = adc_read(suite.adc, divider_voltage(adc_strain, r_strain, src)).code
    codes["strain"] = code
    y_meas = divider_resistance(adc_strain, code, src) / suite.gauge.r_baseline - 1.0
    d_meas_mm = diameter_from_reading(suite.gauge, suite.geometry, y_meas,
                                      suite.bend_curve) * 1e3

    vpd = vapor_pressures(VpdInputs(leaf_t, air_t, air_rh))
    measurements = {
        "leaf_temp_c": leaf_t,
        "air_temp_c": air_t,
        "leaf_rh_pct": leaf_rh,
        "air_rh_pct": air_rh,
        "strain_rel_resistance": y_meas,
        "stem_diameter_mm": d_meas_mm,
        "vp_sat_kpa": vpd.vp_sat,
        "vp_air_kpa": vpd.vp_air,
        "vpd_kpa": vpd.vpd,
    }
    return measurements, codes


def end_to_end(sc: PlantScenario, suite: SuiteConfig | None = None) -> RunOutput:
    """Full composition: truth -> forward models -> ADC -> power-gated
    sampling -> inverse pipelines -> analytics."""
    suite = suite or default_suite()
    out = generate(sc)
    duration_s = sc.duration_days * SECONDS_PER_DAY
    if len(out.truth["air_temp_c"]) == 0:
        out.report = _build_report(sc, suite, out, None)
        return out

    profile = harvest_profile(sc, suite, out.truth)
    events, final = simulate(suite.power, profile, duration_s)
    out.events = events
    completed = [ev for ev in events if ev.completed]

    sensed_names = ("leaf_temp_c", "air_temp_c", "leaf_rh_pct", "air_rh_pct",
                    "strain_rel_resistance")
    derived_names = ("stem_diameter_mm", "vp_sat_kpa", "vp_air_kpa", "vpd_kpa")
    sensed: dict[str, list[float]] = {k: [] for k in sensed_names}
    derived: dict[str, list[float]] = {k: [] for k in derived_names}
    code_cols: dict[str, list[float]] = {}
    times: list[float] = []
    for ev in completed:
        m, codes = _measure(suite, out.truth, ev.start_time)
        ev.measurements = m
        times.append(ev.start_time)
        for k in sensed_names:
            sensed[k].append(m[k])
        for k in derived_names:
            derived[k].append(m[k])
        for k, c in codes.items():
            code_cols.setdefault(k, []).append(float(c))

    t_arr = np.array(times)
    units = {"leaf_temp_c": CELSIUS, "air_temp_c": CELSIUS,
             "leaf_rh_pct": PERCENT_RH, "air_rh_pct": PERCENT_RH,
             "strain_rel_resistance": REL_RESISTANCE,
             "stem_diameter_mm": MILLIMETRE, "vp_sat_kpa": KPA,
             "vp_air_kpa": KPA, "vpd_kpa": KPA}
    out.sensed = {k: TimeSeries(t_arr, np.array(v), k, units[k])
                  for k, v in sensed.items()}
    out.derived = {k: TimeSeries(t_arr, np.array(v), k, units[k])
                   for k, v in derived.items()}
    out.digitized = {k: TimeSeries(t_arr, np.array(v), f"{k}_code", "adc_code")
                     for k, v in code_cols.items()}

    if len(times) >= 2:
        # full-span windows: reading-gated series are too sparse for the
        # short field windows to be meaningful
        span_days = max(sc.duration_days, 1e-9)
        full = replace(suite.stress, vpd_window_days=span_days,
                       dia_window_days=span_days)
        out.label = classify_stress(out.derived["vpd_kpa"],
                                    out.derived["stem_diameter_mm"], full)
    out.report = _build_report(sc, suite, out, final)
    return out


def _scenario_echo(sc: PlantScenario) -> dict:
    echo = asdict(sc)
    echo["condition"] = sc.condition.value
    echo["watering_times_s"] = list(sc.watering_times_s)
    echo["salinity_dose_times_s"] = list(sc.salinity_dose_times_s)
    return echo


def _build_report(sc: PlantScenario, suite: SuiteConfig, out: RunOutput,
                  final) -> dict:
    from . import __version__

    results: dict = {
        "readings_completed_count": sum(1 for e in out.events if e.completed),
        "readings_aborted_count": sum(1 for e in out.events if not e.completed),
    }
    if final is not None:
        results["energy_harvested_j"] = final.energy_harvested
        results["energy_delivered_j"] = final.energy_delivered
        results["ledger_residual_j"] = ledger_residual(suite.power, final)
    if out.label is not None:
        results["stress_label"] = out.label.label.value
        results["vpd_slope_kpa_per_day"] = out.label.vpd_slope
        results["diameter_slope_mm_per_day"] = out.label.diameter_slope
    vpd = out.derived.get("vpd_kpa")
    if vpd is not None and len(vpd) > 0:
        results["vpd_mean_kpa"] = float(vpd.values.mean())
        results["vpd_min_kpa"] = float(vpd.values.min())
        results["vpd_max_kpa"] = float(vpd.values.max())
    return {
        "schema_version": report_mod.SCHEMA_VERSION,
        "tool_name": "planta",
        "tool_version": __version__,
        "scenario": _scenario_echo(sc),
        "suite": {
            "capacitance_f": suite.power.capacitance,
            "wake_voltage_v": suite.power.wake_voltage,
            "brownout_voltage_v": suite.power.brownout_voltage,
            "converter_efficiency": suite.power.converter_efficiency,
            "active_current_a": suite.power.active_current,
            "reading_latency_s": suite.power.reading_latency,
            "internal_resistance_ohm": suite.meg.internal_resistance,
            "harvest_derating": suite.harvest_derating,
            "adc_bits": suite.adc.bits,
            "adc_vref_v": suite.adc.vref,
            "gauge_factor_low": suite.gauge.gf_low,
            "gauge_factor_high": suite.gauge.gf_high,
            "arc_length_m": suite.geometry.arc_length,
            "sensor_thickness_m": suite.geometry.sensor_thickness,
            "stress_vpd_threshold_kpa_per_day": suite.stress.vpd_threshold,
            "stress_dia_threshold_mm_per_day": suite.stress.dia_threshold,
        },
        "results": results,
    }


def scenario_from_toml(path: str | Path) -> PlantScenario:
    """Load a scenario file; unknown keys are rejected to catch typos."""
    path = Path(path)
    with path.open("rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as e:
            raise ParseError(f"{path}: {e}") from None

    kwargs: dict = {}
    sections = {
        "scenario": {"duration_days", "condition", "seed"},
        "environment": {"air_temp_mean_c", "air_temp_swing_c", "air_rh_mean_pct",
                        "air_rh_swing_pct", "peak_hour", "leaf_temp_offset_c",
                        "leaf_rh_offset_pct", "sample_seconds"},
        "growth": {"initial_diameter_mm", "growth_mm_per_day",
                   "rh_drift_pct_per_day"},
        "noise": {"air_temp_sigma_c", "air_rh_sigma_pct", "diameter_sigma_mm"},
        "events": {"watering_times_s", "salinity_dose_times_s"},
    }
    for section, keys in sections.items():
        body = doc.pop(section, {})
        if not isinstance(body, dict):
            raise ParseError(f"{path}: [{section}] must be a table")
        for key, value in body.items():
            if key not in keys:
                raise ParseError(f"{path}: unknown key {key!r} in [{section}]")
            kwargs[key] = value
    if doc:
        raise ParseError(f"{path}: unknown section(s) {sorted(doc)!r}")

    if "condition" in kwargs:
        try:
            kwargs["condition"] = Condition(kwargs["condition"])
        except ValueError:
            names = [c.value for c in Condition]
            raise ParseError(
                f"{path}: condition must be one of {names}") from None
    for key in ("watering_times_s", "salinity_dose_times_s"):
        if key in kwargs:
            kwargs[key] = tuple(float(x) for x in kwargs[key])
    try:
        return PlantScenario(**kwargs)
    except (TypeError, InvariantViolationError) as e:
        raise ParseError(f"{path}: {e}") from None


def write_run_output(out: RunOutput, directory: str | Path) -> list[Path]:
    """Write the full output tree; returns the created paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    created: list[Path] = []

    def put_series(prefix: str, channels: dict[str, TimeSeries]) -> None:
        for name, series in channels.items():
            p = directory / f"{prefix}_{name}.csv"
            buf = io.StringIO()
            _write_series(buf, series)
            report_mod.write_text_atomic(buf.getvalue(), p)
            created.append(p)

    put_series("truth", out.truth)
    put_series("sensed", out.sensed)
    put_series("digitized", out.digitized)
    put_series("derived", out.derived)

    events_path = directory / "events.csv"
    buf = io.StringIO()
    _write_events(buf, out.events)
    report_mod.write_text_atomic(buf.getvalue(), events_path)
    created.append(events_path)

    vpd_path = directory / "vpd_report.csv"
    buf = io.StringIO()
    _write_vpd_report(buf, out)
    report_mod.write_text_atomic(buf.getvalue(), vpd_path)
    created.append(vpd_path)

    report_path = directory / "report.json"
    report_mod.write_json(out.report, report_path)
    created.append(report_path)
    return created


def _write_series(fh, series: TimeSeries) -> None:
    fh.write(f"t_seconds,{series.channel or 'value'}\n")
    for t, v in zip(series.times, series.values):
        fh.write(f"{float(t)!r},{float(v)!r}\n")


def _write_events(fh, events: list[ReadingEvent]) -> None:
    fh.write("start_time,completed,energy_used_joules\n")
    for ev in events:
        flag = "true" if ev.completed else "false"
        fh.write(f"{float(ev.start_time)!r},{flag},{float(ev.energy_used)!r}\n")


def _write_vpd_report(fh, out: RunOutput) -> None:
    fh.write("t,leaf_temp_c,air_temp_c,air_rh_pct,vp_sat_kpa,vp_air_kpa,"
             "vpd_kpa,power_source\n")
    for ev in out.events:
        if not ev.completed or not ev.measurements:
            continue
        m = ev.measurements
        cells = [float(ev.start_time), m["leaf_temp_c"], m["air_temp_c"],
                 m["air_rh_pct"], m["vp_sat_kpa"], m["vp_air_kpa"], m["vpd_kpa"]]
        fh.write(",".join(repr(float(c)) for c in cells) + ",self\n")
