"""Plant-level derived quantities.

Vapor pressure deficit from under-leaf temperature and open-air
temperature/humidity (Tetens form, base-10, constants fixed for
comparability), abiotic stress classification from VPD and stem-diameter
trends, water-translocation lag between two leaf heights, and the
leaf-tattoo interface impedance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientDataError,
    NoEqualizationError,
    NonPositiveError,
    SanityRangeError,
    ZeroCurrentError,
)
from .series import TimeSeries, linear_trend
from .units import SECONDS_PER_DAY, check_rh

# Tetens saturation pressure constants (kPa, base-10 exponent); fixed, not
# configurable, so results stay comparable across deployments.
TETENS_A = 0.6107
TETENS_B = 7.5
TETENS_C = 237.3

#: physically plausible temperature window accepted by the VPD model, degC
SANITY_TEMP = (-20.0, 60.0)


@dataclass(frozen=True)
class VpdInputs:
    """Temperatures in degC, humidity in %RH."""

    leaf_temp: float
    air_temp: float
    air_rh: float

    def __post_init__(self) -> None:
        lo, hi = SANITY_TEMP
        for name in ("leaf_temp", "air_temp"):
            t = getattr(self, name)
            if not lo <= t <= hi:
                raise SanityRangeError(f"{name} {t!r} outside [{lo}, {hi}] degC")
        check_rh(self.air_rh)


@dataclass(frozen=True)
class VpdResult:
    """kPa; `vpd` can be negative when the air is much warmer than the leaf
    at high humidity, which is reported rather than clipped."""

    vp_sat: float
    vp_air: float
    vpd: float

    @property
    def negative(self) -> bool:
        return self.vpd < 0.0


class StressCategory(enum.Enum):
    HEALTHY = "HEALTHY"
    WATER_STRESS = "WATER_STRESS"
    SALINITY_STRESS = "SALINITY_STRESS"
    INDETERMINATE = "INDETERMINATE"


@dataclass(frozen=True)
class StressLabel:
    label: StressCategory
    vpd_slope: float        # kPa/day over the VPD window
    diameter_slope: float   # mm/day over the diameter window


@dataclass(frozen=True)
class StressConfig:
    """Classification windows and thresholds.

    No published thresholds exist; the defaults leave margin below the
    roughly +/-0.01 mm/day growth signals seen in the bundled stem data
    and are always echoed into reports.
    """

    vpd_window_days: float = 3.0
    dia_window_days: float = 7.0
    vpd_threshold: float = 0.02    # kPa/day
    dia_threshold: float = 0.003   # mm/day


@dataclass(frozen=True)
class ImpedanceCircuit:
    """Series resistance feeding one parallel RC branch (interface model)."""

    r_series: float
    r_ct: float
    c_dl: float

    def __post_init__(self) -> None:
        if self.r_series <= 0 or self.r_ct <= 0 or self.c_dl <= 0:
            raise NonPositiveError("circuit elements must be > 0")


def saturation_vapor_pressure(temp_c: float) -> float:
    """Tetens saturation vapor pressure, kPa."""
    return TETENS_A * 10.0 ** (TETENS_B * temp_c / (TETENS_C + temp_c))


def vapor_pressures(inp: VpdInputs) -> VpdResult:
    """Saturation pressure beneath the leaf, actual vapor pressure of the
    air, and their difference."""
    vp_sat = saturation_vapor_pressure(inp.leaf_temp)
    vp_air = saturation_vapor_pressure(inp.air_temp) * (inp.air_rh / 100.0)
    return VpdResult(vp_sat, vp_air, vp_sat - vp_air)


def classify_stress(vpd: TimeSeries, diameter: TimeSeries,
                    cfg: StressConfig = StressConfig()) -> StressLabel:
    """Label the plant from trailing VPD and diameter trends.

    Shrinking stem with rising VPD reads as water stress, shrinking stem
    with falling VPD as salinity stress; a non-shrinking stem under flat
    VPD is healthy; anything else is indeterminate.
    """
    s_v = linear_trend(vpd, cfg.vpd_window_days * SECONDS_PER_DAY)
    s_d = linear_trend(diameter, cfg.dia_window_days * SECONDS_PER_DAY)
    shrinking = s_d < -cfg.dia_threshold
    if shrinking and s_v > cfg.vpd_threshold:
        label = StressCategory.WATER_STRESS
    elif shrinking and s_v < -cfg.vpd_threshold:
        label = StressCategory.SALINITY_STRESS
    elif not shrinking and abs(s_v) <= cfg.vpd_threshold:
        label = StressCategory.HEALTHY
    else:
        label = StressCategory.INDETERMINATE
    return StressLabel(label, s_v, s_d)


def _common_grid(lower: TimeSeries, upper: TimeSeries) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if np.array_equal(lower.times, upper.times):
        return lower.times, np.asarray(lower.values), np.asarray(upper.values)
    t0 = max(lower.t_start, upper.t_start)
    t1 = min(lower.t_end, upper.t_end)
    if t1 <= t0:
        raise InsufficientDataError("series do not overlap in time")
    dt = min(float(np.median(np.diff(lower.times))),
             float(np.median(np.diff(upper.times))))
    grid = np.arange(t0, t1 + dt / 2, dt)
    return (grid,
            np.interp(grid, lower.times, lower.values),
            np.interp(grid, upper.times, upper.values))


def _detrend(v: np.ndarray, t: np.ndarray) -> np.ndarray:
    tc = t - t.mean()
    denom = float(np.dot(tc, tc))
    slope = float(np.dot(tc, v - v.mean())) / denom if denom > 0 else 0.0
    return v - v.mean() - slope * tc


def translocation_lag(lower: TimeSeries, upper: TimeSeries,
                      max_lag: float = 8 * 3600.0,
                      equal_tol: float = 1.0,
                      watering_time: float | None = None,
                      ) -> tuple[float, float]:
    """(lag_seconds, equalization_time) between two leaf-height channels.

    Lag is the argmax of the normalized cross-correlation of the linearly
    detrended series over [0, max_lag]; positive means the upper channel
    trails the lower one.  Equalization is the first time at or after the
    watering marker where |lower - upper| stays within `equal_tol` for at
    least 3 consecutive samples.
    """
    if len(lower) < 2 or len(upper) < 2:
        raise InsufficientDataError("need >=2 samples per channel")
    t, lo, up = _common_grid(lower, upper)
    dt = float(t[1] - t[0])
    lo_d = _detrend(lo, t)
    up_d = _detrend(up, t)
    kmax = min(int(max_lag / dt), len(t) - 2)
    best_k = 0
    best_c = -np.inf
    for k in range(kmax + 1):
        a = lo_d[: len(t) - k]
        b = up_d[k:]
        denom = float(np.linalg.norm(a)) * float(np.linalg.norm(b))
        if denom == 0.0:
            continue
        c = float(np.dot(a, b)) / denom
        if c > best_c:
            best_c, best_k = c, k
    if not np.isfinite(best_c):
        raise InsufficientDataError("channels have no variance to correlate")
    lag = best_k * dt

    start = watering_time if watering_time is not None else float(t[0])
    within = np.abs(lo - up) <= equal_tol
    run = 0
    for i in range(len(t)):
        if t[i] < start:
            continue
        if within[i]:
            run += 1
            if run >= 3:
                return lag, float(t[i - 2])
        else:
            run = 0
    raise NoEqualizationError(
        f"|lower - upper| never stayed within {equal_tol} for 3 samples")


def impedance(circuit: ImpedanceCircuit, f: float) -> complex:
    """Interface impedance at frequency f (Hz): R_s + R_ct / (1 + j w R_ct C)."""
    if f < 0:
        raise NonPositiveError("frequency must be >= 0")
    w = 2.0 * math.pi * f
    return circuit.r_series + circuit.r_ct / (1.0 + 1j * w * circuit.r_ct * circuit.c_dl)


def measured_impedance(v_ac: float, i_ac: float) -> float:
    """Interface impedance magnitude from a measured AC voltage/current pair."""
    if i_ac == 0:
        raise ZeroCurrentError("i_ac must be nonzero")
    return v_ac / i_ac
