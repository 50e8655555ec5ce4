"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 data error, 4 infeasible request.
With --json, results go to stdout and errors to stderr as single JSON
documents with sorted keys and floats at 6 significant digits, so repeated
runs on identical inputs are byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__, report
from .analytics import (
    StressCategory,
    StressConfig,
    VpdInputs,
    translocation_lag,
    vapor_pressures,
)
from .calibration import read_table_csv
from .datafiles import SCENARIO_HEALTHY, data_path
from .errors import (
    InfeasibleError,
    NoEqualizationError,
    ParseError,
    PlantaError,
)
from .kirigami import GaugeModel, StemGeometry, diameter_from_reading
from .meg import (
    EfficiencyInputs,
    MegConfig,
    default_voc_table,
    evaporation_efficiency,
    find_mpp,
    open_circuit_voltage,
)
from .powerchain import (
    PowerChainConfig,
    ledger_residual,
    min_power_for_readings,
    read_profile_csv,
    simulate,
    write_events_csv,
)
from .series import read_series_csv
from .stemtable import condition_slopes, parse_stem_table, stretched_offset_check
from .scenario import end_to_end, scenario_from_toml, write_run_output

USAGE_ERROR, DATA_ERROR, INFEASIBLE = 2, 3, 4


def _emit(doc: dict, as_json: bool) -> None:
    if as_json:
        sys.stdout.write(report.dumps(doc))
    else:
        for key, value in doc.items():
            if isinstance(value, float):
                value = f"{value:.6g}"
            sys.stdout.write(f"{key}: {value}\n")


def _fail(message: str, code: int, as_json: bool) -> int:
    if as_json:
        sys.stderr.write(report.dumps({"error": message, "exit_code": code}))
    else:
        sys.stderr.write(f"error: {message}\n")
    return code


def _load_meg_config(path: str | None) -> MegConfig:
    """Optional TOML with a [meg] table; unset keys keep their defaults."""
    if path is None:
        return MegConfig()
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    body = doc.get("meg", {})
    table = default_voc_table(body.get("anchor_voltage_v", 0.15))
    if "voc_table_csv" in body:
        table = read_table_csv(Path(body["voc_table_csv"]))
    kwargs = {}
    if "internal_resistance_ohm" in body:
        kwargs["internal_resistance"] = float(body["internal_resistance_ohm"])
    if "active_area_m2" in body:
        kwargs["active_area"] = float(body["active_area_m2"])
    if "converter_efficiency" in body:
        kwargs["converter_efficiency"] = float(body["converter_efficiency"])
    return MegConfig(voc_vs_rh=table, **kwargs)


def _cmd_vpd(args) -> dict:
    res = vapor_pressures(VpdInputs(args.leaf_temp, args.air_temp, args.rh))
    return {"vp_sat_kpa": res.vp_sat, "vp_air_kpa": res.vp_air,
            "vpd_kpa": res.vpd, "negative": res.negative}


def _cmd_mpp(args) -> dict:
    cfg = _load_meg_config(args.config)
    grid = [float(x) for x in args.grid.split(",") if x.strip()]
    load, power = find_mpp(cfg, args.rh, grid)
    voc = open_circuit_voltage(cfg, args.rh)
    return {"mpp_load_ohm": load, "mpp_power_w": power,
            "open_circuit_voltage_v": voc,
            "power_density_uw_per_cm2": power / cfg.active_area * 100.0}


def _cmd_efficiency(args) -> dict:
    inp = EfficiencyInputs(args.output_joules, args.evaporated_grams)
    return {"input_energy_j": inp.input_energy(),
            "efficiency": evaporation_efficiency(inp),
            "output_energy_j": inp.output_energy,
            "evaporated_mass_g": inp.evaporated_mass}


def _cmd_simulate_power(args) -> dict:
    cfg = PowerChainConfig()
    profile = read_profile_csv(Path(args.profile)) if args.profile else args.power_watts
    if profile is None:
        raise ParseError("give --profile or --power-watts")
    events, final = simulate(cfg, profile, args.hours * 3600.0)
    if args.events_out:
        write_events_csv(events, Path(args.events_out))
    return {"readings_completed_count": sum(1 for e in events if e.completed),
            "readings_aborted_count": sum(1 for e in events if not e.completed),
            "energy_harvested_j": final.energy_harvested,
            "energy_delivered_j": final.energy_delivered,
            "final_cap_voltage_v": final.cap_voltage,
            "ledger_residual_j": ledger_residual(cfg, final)}


def _cmd_min_power(args) -> dict:
    cfg = PowerChainConfig()
    watts = min_power_for_readings(cfg, args.readings, args.hours * 3600.0)
    return {"min_power_w": watts, "readings_count": args.readings,
            "horizon_hours": args.hours}


def _cmd_diameter(args) -> dict:
    geo = StemGeometry(arc_length=args.arc, sensor_thickness=args.thickness)
    d = diameter_from_reading(GaugeModel(), geo, args.rel_resistance)
    return {"diameter_mm": d * 1e3, "rel_resistance": args.rel_resistance}


def _cmd_analyze_stems(args) -> dict:
    table = parse_stem_table(Path(args.table) if args.table else None)
    slopes = condition_slopes(table)
    offsets = stretched_offset_check(table)
    cfg = StressConfig()
    doc: dict = {}
    # assumed-vpd mode pairs each treatment with the VPD trend that
    # treatment produces; it is a consistency check of the dataset, not an
    # independent diagnosis
    assumed = {"unstressed": 0.0, "water": 2.0 * cfg.vpd_threshold,
               "salinity": -2.0 * cfg.vpd_threshold}
    for cond in ("unstressed", "water", "salinity"):
        slope = slopes[cond]
        shrinking = slope < -cfg.dia_threshold
        if args.label_mode == "trend":
            label = "SHRINKING" if shrinking else "GROWING"
        else:
            s_v = assumed[cond]
            if shrinking and s_v > cfg.vpd_threshold:
                label = StressCategory.WATER_STRESS.value
            elif shrinking and s_v < -cfg.vpd_threshold:
                label = StressCategory.SALINITY_STRESS.value
            elif not shrinking and abs(s_v) <= cfg.vpd_threshold:
                label = StressCategory.HEALTHY.value
            else:
                label = StressCategory.INDETERMINATE.value
        doc[f"{cond}_slope_mm_per_day"] = slope
        doc[f"{cond}_offset_mm"] = offsets[cond].mean
        doc[f"{cond}_offset_max_dev_mm"] = offsets[cond].max_abs_dev_from_mean
        doc[f"{cond}_label"] = label
    return doc


def _cmd_lag(args) -> dict:
    lower = read_series_csv(Path(args.lower))
    upper = read_series_csv(Path(args.upper))
    lag_s, eq_t = translocation_lag(lower, upper, max_lag=args.max_lag_hours * 3600.0,
                                    equal_tol=args.equal_tol)
    return {"lag_minutes": lag_s / 60.0, "lag_seconds": lag_s,
            "equalization_time_s": eq_t}


def _cmd_scenario_run(args) -> dict:
    path = Path(args.file) if args.file else data_path(SCENARIO_HEALTHY)
    sc = scenario_from_toml(path)
    if args.seed is not None:
        sc = replace(sc, seed=args.seed)
    out = end_to_end(sc)
    created = write_run_output(out, Path(args.out))
    return {"output_dir": str(Path(args.out)),
            "files_written_count": len(created),
            "readings_completed_count": out.report["results"]["readings_completed_count"],
            "stress_label": out.report["results"].get("stress_label", "INDETERMINATE")}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planta",
        description="Self-powered plant sensing suite: models, simulator and analytics.")
    parser.add_argument("--version", action="version", version=f"planta {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("vpd", parents=[common],
                       help="vapor pressure deficit from leaf/air readings")
    p.add_argument("--leaf-temp", type=float, required=True, help="degC beneath the leaf")
    p.add_argument("--air-temp", type=float, required=True, help="degC open air")
    p.add_argument("--rh", type=float, required=True, help="open-air %%RH")
    p.set_defaults(fn=_cmd_vpd)

    p = sub.add_parser("mpp", parents=[common], help="maximum power point of the generator")
    p.add_argument("--config", help="TOML file with a [meg] table")
    p.add_argument("--rh", type=float, required=True)
    p.add_argument("--grid", default="5,10,20,40,80", help="comma list of loads, ohm")
    p.set_defaults(fn=_cmd_mpp)

    p = sub.add_parser("efficiency", parents=[common], help="evaporation-energy conversion efficiency")
    p.add_argument("--output-joules", type=float, required=True)
    p.add_argument("--evaporated-grams", type=float, required=True)
    p.set_defaults(fn=_cmd_efficiency)

    p = sub.add_parser("simulate-power", parents=[common], help="run the intermittent power chain")
    p.add_argument("--profile", help="harvest CSV: t_seconds,power_watts")
    p.add_argument("--power-watts", type=float, help="constant harvest power")
    p.add_argument("--hours", type=float, required=True)
    p.add_argument("--events-out", help="write the reading event log CSV here")
    p.set_defaults(fn=_cmd_simulate_power)

    p = sub.add_parser("min-power", parents=[common], help="smallest constant power for n readings")
    p.add_argument("--readings", type=int, required=True)
    p.add_argument("--hours", type=float, required=True)
    p.set_defaults(fn=_cmd_min_power)

    p = sub.add_parser("diameter", parents=[common], help="stem diameter from a strain reading")
    p.add_argument("--rel-resistance", type=float, required=True, help="dR/R0")
    p.add_argument("--arc", type=float, default=0.021, help="sensor arc length, m")
    p.add_argument("--thickness", type=float, default=205e-6, help="sensor thickness, m")
    p.set_defaults(fn=_cmd_diameter)

    p = sub.add_parser("analyze-stems", parents=[common], help="slopes/offsets/labels of a stem table")
    p.add_argument("--table", help="stem diameter CSV (bundled dataset by default)")
    p.add_argument("--label-mode", choices=["trend", "assumed-vpd"], default="trend")
    p.set_defaults(fn=_cmd_analyze_stems)

    p = sub.add_parser("lag", parents=[common], help="water translocation lag between two leaf heights")
    p.add_argument("--lower", required=True, help="lower leaf RH CSV")
    p.add_argument("--upper", required=True, help="upper leaf RH CSV")
    p.add_argument("--max-lag-hours", type=float, default=8.0)
    p.add_argument("--equal-tol", type=float, default=1.0, help="%%RH")
    p.set_defaults(fn=_cmd_lag)

    p = sub.add_parser("scenario", help="synthetic end-to-end runs")
    ssub = p.add_subparsers(dest="scenario_command", required=True)
    pr = ssub.add_parser("run", parents=[common], help="run a scenario file and write the output tree")
    pr.add_argument("--file", help="scenario TOML (bundled healthy scenario by default)")
    pr.add_argument("--seed", type=int, help="override the file's seed")
    pr.add_argument("--out", required=True, help="output directory")
    pr.set_defaults(fn=_cmd_scenario_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    as_json = getattr(args, "json", False)
    try:
        doc = args.fn(args)
    except (InfeasibleError, NoEqualizationError) as e:
        return _fail(str(e), INFEASIBLE, as_json)
    except (PlantaError, FileNotFoundError) as e:
        return _fail(str(e), DATA_ERROR, as_json)
    _emit(doc, as_json)
    return 0


if __name__ == "__main__":
    sys.exit(main())
