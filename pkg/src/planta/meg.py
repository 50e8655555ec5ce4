"""Electrical model of the moisture-driven generator (MEG).

The device is treated as a Thevenin source: an open-circuit voltage set by
the relative humidity it sees (through a calibration table) behind a fixed
internal resistance.  The 20 ohm default for the internal resistance is
inferred from impedance matching at the observed maximum power point; it is
configurable because it was never measured directly.

The default voltage table is synthesized from the device's nominal
sensitivity (4.2 mV/%RH over the 30-90 %RH calibrated band) around a
configurable anchor voltage; replace it with bench calibration data for a
real unit.  Membrane thickness enters as a saturating multiplicative gain
on the open-circuit voltage, normalized to 1 at the optimal thickness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .calibration import CalibrationTable, Extrapolation, linear_table
from .errors import EmptyGridError, NonPositiveError
from .units import PERCENT_RH, VOLT, check_rh

#: molar mass of water, g/mol
WATER_MOLAR_MASS = 18.015
#: molar heat of evaporation of water, J/mol
HEAT_OF_EVAPORATION = 44000.0

#: nominal humidity sensitivity of the generator voltage, V per %RH
RH_SENSITIVITY = 0.0042

#: active disc area for a 5 mm diameter membrane, m^2
DISC_5MM_AREA = math.pi * 0.0025**2


def default_voc_table(anchor_voltage: float = 0.15,
                      sensitivity: float = RH_SENSITIVITY) -> CalibrationTable:
    """Open-circuit voltage vs %RH over the 30-90 %RH calibrated band.

    Synthesized: the slope is the nominal sensitivity and the 30 %RH anchor
    is a configuration value, not a measured point.
    """
    rhs = tuple(range(30, 91, 10))
    return CalibrationTable(
        tuple(float(r) for r in rhs),
        tuple(anchor_voltage + sensitivity * (r - 30.0) for r in rhs),
        policy=Extrapolation.CLAMP,
        stimulus_unit=PERCENT_RH,
        response_unit=VOLT,
    )


@dataclass(frozen=True)
class MegConfig:
    """Generator parameters.

    `thickness_gain` maps membrane thickness to a relative output gain in
    (0, 1]; with a CLAMP policy the value past the last knot models the
    saturation plateau.  When omitted, the gain is 1.
    """

    voc_vs_rh: CalibrationTable = field(default_factory=default_voc_table)
    internal_resistance: float = 20.0
    membrane_thickness: float | None = None
    thickness_gain: CalibrationTable | None = None
    active_area: float = DISC_5MM_AREA
    converter_efficiency: float = 0.8

    def __post_init__(self) -> None:
        if self.internal_resistance <= 0:
            raise NonPositiveError("internal_resistance must be > 0")
        if self.active_area <= 0:
            raise NonPositiveError("active_area must be > 0")
        if not 0.0 < self.converter_efficiency <= 1.0:
            raise NonPositiveError("converter_efficiency must be in (0, 1]")
        if self.thickness_gain is not None:
            g = self.thickness_gain
            if not g.increasing:
                raise NonPositiveError("thickness_gain must be non-decreasing")
            if max(g.response) > 1.0 + 1e-12:
                raise NonPositiveError("thickness_gain must not exceed 1")
            if self.membrane_thickness is None:
                raise NonPositiveError("thickness_gain given without membrane_thickness")


@dataclass(frozen=True)
class LoadPoint:
    """One point of the source's load sweep."""

    load_resistance: float
    voltage: float
    current: float
    power: float


@dataclass(frozen=True)
class EfficiencyInputs:
    """Inputs of the evaporation-energy efficiency procedure."""

    output_energy: float        # J, integrated electrical output
    evaporated_mass: float      # g of water evaporated over the same period
    molar_mass_water: float = WATER_MOLAR_MASS
    heat_of_evaporation: float = HEAT_OF_EVAPORATION

    def __post_init__(self) -> None:
        for name in ("output_energy", "evaporated_mass", "molar_mass_water",
                     "heat_of_evaporation"):
            if getattr(self, name) <= 0:
                raise NonPositiveError(f"{name} must be > 0")

    def input_energy(self) -> float:
        """Thermal energy spent evaporating the measured mass, J."""
        return self.evaporated_mass / self.molar_mass_water * self.heat_of_evaporation


def open_circuit_voltage(cfg: MegConfig, rh: float) -> float:
    """Open-circuit voltage at the given relative humidity."""
    check_rh(rh)
    voc = cfg.voc_vs_rh.eval(rh)
    if cfg.thickness_gain is not None:
        voc *= cfg.thickness_gain.eval(cfg.membrane_thickness)
    return voc


def operating_point(cfg: MegConfig, rh: float, load: float) -> LoadPoint:
    """Thevenin voltage division onto a resistive load (load >= 0, inf allowed)."""
    if load < 0:
        raise NonPositiveError("load resistance must be >= 0")
    voc = open_circuit_voltage(cfg, rh)
    if math.isinf(load):
        return LoadPoint(load, voc, 0.0, 0.0)
    i = voc / (load + cfg.internal_resistance)
    v = i * load
    return LoadPoint(load, v, i, v * i)


def find_mpp(cfg: MegConfig, rh: float, load_grid: list[float]) -> tuple[float, float]:
    """Grid point with the highest delivered power (ties go to the smaller load).

    For the Thevenin model this lands on the grid point closest to the
    internal resistance in log distance; an exact match yields
    P = Voc^2 / (4 R_int).
    """
    grid = list(load_grid)
    if not grid:
        raise EmptyGridError("load grid is empty")
    if any(r <= 0 for r in grid):
        raise NonPositiveError("load grid entries must be > 0")
    best_r = None
    best_p = -math.inf
    for r in sorted(grid):
        p = operating_point(cfg, rh, r).power
        if p > best_p:
            best_r, best_p = r, p
    return float(best_r), float(best_p)


def power_density(power: float, cfg: MegConfig) -> float:
    """Areal power density in W/m^2 (multiply by 100 for uW/cm^2)."""
    if power < 0:
        raise NonPositiveError("power must be >= 0")
    return power / cfg.active_area


def evaporation_efficiency(inp: EfficiencyInputs) -> float:
    """Electrical output energy over the thermal energy of the evaporated water."""
    return inp.output_energy / inp.input_energy()
