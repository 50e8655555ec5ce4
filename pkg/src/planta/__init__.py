"""planta: digital twin and analytics for a self-powered plant sensing suite.

Models a moisture-driven generator as a calibrated electrical source, the
intermittent power chain it feeds, the forward/inverse sensor
transductions (temperature, humidity, strain), and the plant-level
quantities derived from them (vapor pressure deficit, stem diameter,
abiotic stress class, water-translocation lag).
"""

__version__ = "0.1.0"

from .analytics import (
    ImpedanceCircuit,
    StressCategory,
    StressConfig,
    StressLabel,
    VpdInputs,
    VpdResult,
    classify_stress,
    impedance,
    measured_impedance,
    saturation_vapor_pressure,
    translocation_lag,
    vapor_pressures,
)
from .calibration import CalibrationTable, Extrapolation, linear_table, read_table_csv
from .errors import PlantaError
from .kirigami import (
    DisturbanceEvent,
    DisturbanceShape,
    GaugeModel,
    StemGeometry,
    baseline_correct,
    bending_strain,
    curvature_angle,
    curvature_radius,
    default_bending_table,
    diameter_from_reading,
    reading_from_diameter,
    rel_resistance_to_strain,
    simulate_disturbance,
    strain_to_rel_resistance,
)
from .meg import (
    EfficiencyInputs,
    LoadPoint,
    MegConfig,
    default_voc_table,
    evaporation_efficiency,
    find_mpp,
    open_circuit_voltage,
    operating_point,
    power_density,
)
from .powerchain import (
    Mode,
    PowerChainConfig,
    PowerChainState,
    ReadingEvent,
    initial_state,
    ledger_residual,
    min_power_for_readings,
    simulate,
    step,
)
from .scenario import (
    Condition,
    PlantScenario,
    RunOutput,
    SuiteConfig,
    end_to_end,
    generate,
    scenario_from_toml,
    write_run_output,
)
from .series import TimeSeries, coefficient_of_variation, linear_trend
from .stemtable import StemTable, condition_slopes, parse_stem_table, stretched_offset_check
from .transducers import (
    AdcModel,
    HumiditySensorModel,
    TempSensorModel,
    adc_read,
    code_to_voltage,
    divider_resistance,
    divider_voltage,
    hysteresis_envelope,
    resistance_to_temp,
    rh_from_meg_voltage,
    temp_to_resistance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
