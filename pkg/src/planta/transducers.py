"""Forward and inverse models of the individual sensing channels.

Covers the resistive temperature sensor (linear negative temperature
coefficient), the generator-terminal-voltage humidity channel, and the
low-power readout primitives: a 12-bit SAR quantizer and the voltage
divider used for resistance measurement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calibration import CalibrationTable, Extrapolation
from .errors import NonPositiveError, SensorRangeError
from .meg import RH_SENSITIVITY
from .series import TimeSeries
from .units import OHM, PERCENT_RH, VOLT


@dataclass(frozen=True)
class TempSensorModel:
    """Linear resistive temperature sensor.

    The coefficient is negative (resistance falls 1.02 %/degC); only the
    relative change matters for inversion, so the absolute baseline `r0`
    is a free configuration value.
    """

    r0: float = 10_000.0            # ohm at t_ref
    t_ref: float = 25.0             # degC
    alpha: float = -0.0102          # 1/degC
    t_min: float = 15.0
    t_max: float = 60.0
    hysteresis_band: float = 0.0005  # fractional shift under abrupt changes

    def __post_init__(self) -> None:
        if self.alpha >= 0:
            raise NonPositiveError("alpha must be negative (NTC behaviour)")
        if self.r0 <= 0:
            raise NonPositiveError("r0 must be > 0")
        if self.t_min >= self.t_max:
            raise NonPositiveError("t_min must be below t_max")


def default_humidity_curve(anchor_voltage: float = 0.15,
                           sensitivity: float = RH_SENSITIVITY) -> CalibrationTable:
    """Terminal voltage vs %RH for the humidity channel.

    Same synthesized line as the source model (4.2 mV/%RH over 30-90 %RH)
    but with an erroring policy: inverse maps must not extrapolate.
    """
    rhs = tuple(float(r) for r in range(30, 91, 10))
    return CalibrationTable(
        rhs,
        tuple(anchor_voltage + sensitivity * (r - 30.0) for r in rhs),
        policy=Extrapolation.ERROR,
        stimulus_unit=PERCENT_RH,
        response_unit=VOLT,
    )


@dataclass(frozen=True)
class HumiditySensorModel:
    """Humidity from the generator's terminal voltage.

    `temp_coefficient` linearly corrects the raw inversion for leaf
    temperature away from `t_reference`; the appropriate value depends on
    the deployment, so it defaults to 0 (no correction).
    """

    curve: CalibrationTable = field(default_factory=default_humidity_curve)
    temp_coefficient: float = 0.0   # %RH per degC
    t_reference: float = 25.0

    def __post_init__(self) -> None:
        if not self.curve.increasing:
            raise NonPositiveError("humidity curve must be strictly increasing")


@dataclass(frozen=True)
class RhReading:
    """Inverted humidity; `clamped` marks values pulled back into [0, 100]."""

    rh: float
    clamped: bool = False


@dataclass(frozen=True)
class AdcModel:
    """SAR quantizer plus the divider used for resistance readout."""

    bits: int = 12
    vref: float = 3.3
    divider_fixed_resistor: float = 10_000.0

    def __post_init__(self) -> None:
        if self.bits < 1:
            raise NonPositiveError("bits must be >= 1")
        if self.vref <= 0:
            raise NonPositiveError("vref must be > 0")
        if self.divider_fixed_resistor <= 0:
            raise NonPositiveError("divider_fixed_resistor must be > 0")

    @property
    def full_scale(self) -> int:
        return (1 << self.bits) - 1

    @property
    def lsb(self) -> float:
        return self.vref / self.full_scale


@dataclass(frozen=True)
class AdcReading:
    code: int
    clamped: bool = False


def temp_to_resistance(m: TempSensorModel, t: float) -> float:
    """R = r0 * (1 + alpha * (t - t_ref)); rejects temperatures outside the
    characterized range."""
    if not m.t_min <= t <= m.t_max:
        raise SensorRangeError(f"temperature {t!r} outside [{m.t_min}, {m.t_max}] degC")
    return m.r0 * (1.0 + m.alpha * (t - m.t_ref))


def resistance_to_temp(m: TempSensorModel, r: float) -> float:
    """Exact inverse of :func:`temp_to_resistance`."""
    r_hi = temp_to_resistance(m, m.t_min)
    r_lo = temp_to_resistance(m, m.t_max)
    if not r_lo <= r <= r_hi:
        raise SensorRangeError(f"resistance {r!r} outside [{r_lo:.6g}, {r_hi:.6g}] ohm")
    return m.t_ref + (r / m.r0 - 1.0) / m.alpha


def rh_from_meg_voltage(m: HumiditySensorModel, v: float, leaf_temp: float) -> RhReading:
    """Invert the calibration curve, then apply the linear temperature
    correction; out-of-[0,100] results are clamped and flagged."""
    raw = m.curve.invert(v)
    rh = raw + m.temp_coefficient * (leaf_temp - m.t_reference)
    if rh < 0.0:
        return RhReading(0.0, True)
    if rh > 100.0:
        return RhReading(100.0, True)
    return RhReading(rh, False)


def adc_read(a: AdcModel, v: float) -> AdcReading:
    """Quantize a voltage; inputs outside [0, vref] are clamped and flagged.

    Rounding is half-away-from-zero so codes at exact half-LSB boundaries
    are platform independent.
    """
    clamped = False
    if v < 0.0:
        v, clamped = 0.0, True
    elif v > a.vref:
        v, clamped = a.vref, True
    code = int(math.floor(v / a.vref * a.full_scale + 0.5))
    return AdcReading(code, clamped)


def code_to_voltage(a: AdcModel, code: int) -> float:
    """Midpoint reconstruction; error <= 1/2 LSB for unclamped inputs."""
    return code / a.full_scale * a.vref


def divider_voltage(a: AdcModel, r_sense: float, source: float) -> float:
    """Tap voltage of the fixed-over-sense divider driven from `source`."""
    if r_sense < 0:
        raise NonPositiveError("r_sense must be >= 0")
    return source * r_sense / (a.divider_fixed_resistor + r_sense)


def divider_resistance(a: AdcModel, code: int, source: float) -> float:
    """Sense resistance from an ADC code: R = R_fixed * v / (source - v)."""
    v = code_to_voltage(a, code)
    if v >= source:
        return math.inf
    return a.divider_fixed_resistor * v / (source - v)


def hysteresis_envelope(m: TempSensorModel, trajectory: TimeSeries,
                        decay: float = 0.5) -> TimeSeries:
    """Resistance along a temperature trajectory with direction-dependent lag.

    A single band state follows the sign of dT/dt: +1 while rising (reading
    offset by -band * R), -1 while falling (+band * R), and decays
    geometrically toward 0 while the temperature holds, so steady state
    converges to the linear curve.  Rate independent apart from the
    per-sample hold decay.
    """
    out = np.empty(len(trajectory))
    s = 0.0
    prev = None
    for i, t in enumerate(trajectory.values):
        if prev is not None:
            if t > prev:
                s = 1.0
            elif t < prev:
                s = -1.0
            else:
                s *= decay
        r = temp_to_resistance(m, float(t))
        out[i] = r * (1.0 - m.hysteresis_band * s)
        prev = t
    return TimeSeries(trajectory.times, out, trajectory.channel or "resistance", OHM)
