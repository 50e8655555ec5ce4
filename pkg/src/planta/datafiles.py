"""Access to bundled data files, overridable via PLANTA_DATA_DIR."""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

ENV_VAR = "PLANTA_DATA_DIR"

STEM_TABLE = "stem_diameters_40day.csv"
VOC_TABLE = "meg_voltage_vs_rh.csv"
BENDING_TABLE = "bending_response.csv"
SCENARIO_HEALTHY = "scenario_healthy.toml"


def data_path(name: str) -> Path:
    """Resolve a bundled data file, preferring PLANTA_DATA_DIR when set."""
    override = os.environ.get(ENV_VAR)
    if override:
        candidate = Path(override) / name
        if candidate.exists():
            return candidate
    with resources.as_file(resources.files("planta").joinpath("data", name)) as p:
        return Path(p)
