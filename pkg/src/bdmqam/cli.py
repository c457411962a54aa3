"""Command-line front end.

Settings come from built-in defaults, then an optional JSON config file,
then command-line flags (flags win). Exit status is 0 on success, 1 when a
validation check fails and 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bitcap import capacity_curve_rows
from .constellation import build_constellation, write_constellation_csv
from .coverage import CellModel, coverage_cdf_rows, reference_table
from .report import SWEEP_COLUMNS, compare_rows, sweep_rows, write_csv
from .strategies import REFERENCE_TARGETS, STRATEGIES, StreamTargets, sweep, uniform_grid
from .validation import run_all

OUTPUT_ENV = "BDMQAM_OUTPUT_DIR"
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

DEFAULTS = {
    "intercept_db": 10.81,
    "slope": 37.6,
    "sigma_db": 8.0,
    "radius_km": 0.75,
    "g_base": None,
    "g_enh": None,
    "t_min": 0.0,
    "t_max": 5.0,
    "t_step": 0.05,
    "alpha_min": 0.0,
    "alpha_max": 15.0,
    "alpha_step": 0.02,
    "strategies": list(STRATEGIES),
    "alphas": [1.0, 2.0],
    "esn0_min": -10.0,
    "esn0_max": 30.0,
    "esn0_step": 0.5,
    "cdf_min": -20.0,
    "cdf_max": 40.0,
    "cdf_step": 0.1,
    "seed": 2024,
    "capacity_points": 6,
    "capacity_draws": 1_000_000,
    "coverage_draws": 1_000_000,
    "allocation_instances": 20,
    "output": None,
}

# config key -> name reported in errors
GRID_FIELDS = {"t": "t_grid", "alpha": "alpha_grid", "esn0": "esn0_grid", "cdf": "cdf_grid"}


class ConfigError(ValueError):
    pass


def _grid(cfg: dict, prefix: str) -> np.ndarray:
    field = GRID_FIELDS[prefix]
    lo, hi, step = (cfg[f"{prefix}_{k}"] for k in ("min", "max", "step"))
    for k, v in (("min", lo), ("max", hi), ("step", step)):
        if not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(f"{field}.{k} must be a finite number, got {v!r}")
    if step <= 0:
        raise ConfigError(f"{field}.step must be > 0, got {step!r}")
    if hi < lo:
        raise ConfigError(f"{field}.max must be >= {field}.min")
    return uniform_grid(lo, hi, step)


def _cell(cfg: dict) -> CellModel:
    try:
        return CellModel(cfg["intercept_db"], cfg["slope"], cfg["sigma_db"], cfg["radius_km"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cell: {exc}") from None


def _targets(cfg: dict, cell: CellModel) -> list[StreamTargets]:
    gb, ge = cfg["g_base"], cfg["g_enh"]
    if gb is None and ge is None:
        pairs = REFERENCE_TARGETS
    elif gb is None or ge is None:
        raise ConfigError("g_base and g_enh must be given together")
    else:
        pairs = [(gb, ge)]
    out = []
    for gb, ge in pairs:
        if not 0 < ge < gb < 1:
            raise ConfigError(f"g_base/g_enh: need 0 < g_enh < g_base < 1, got ({gb}, {ge})")
        out.append(StreamTargets.from_coverage(gb, ge, cell))
    return out


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg["output"] or os.environ.get(OUTPUT_ENV) or ".")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output: cannot create {out}: {exc}") from None
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output: {out} is not writable")
    return out


def _tag(g: float) -> str:
    return f"{round(g * 100):d}"


def _record(cfg: dict, command: str, keys) -> dict:
    return {"command": command, **{k: cfg[k] for k in keys}}


CELL_KEYS = ("intercept_db", "slope", "sigma_db", "radius_km")


def cmd_capacity(cfg: dict) -> int:
    grid = _grid(cfg, "esn0")
    alphas = [float(a) for a in cfg["alphas"]]
    if not alphas or any(not math.isfinite(a) or a < 0 for a in alphas):
        raise ConfigError("alphas must be a nonempty list of values >= 0")
    out = _out_dir(cfg)
    rec = _record(cfg, "capacity", ("alphas", "esn0_min", "esn0_max", "esn0_step"))
    path = write_csv(out / "capacity.csv", ["esn0_db", "alpha", "C1", "C2", "C3", "C4", "total"],
                     capacity_curve_rows(alphas, grid), rec)
    print(f"wrote {path}")
    for a in alphas:
        path = out / f"constellation_alpha{a:g}.csv"
        write_constellation_csv(build_constellation(a), path,
                                comment="config: " + json.dumps({"alpha": a}))
        print(f"wrote {path}")
    return EXIT_OK


def cmd_coverage(cfg: dict) -> int:
    cell = _cell(cfg)
    grid = _grid(cfg, "cdf")
    out = _out_dir(cfg)
    rec = _record(cfg, "coverage", CELL_KEYS)
    table = reference_table(cell)
    write_csv(out / "coverage_table.csv", ["coverage", "threshold_db"],
              [(p.coverage, p.threshold_db) for p in table], rec)
    rec = _record(cfg, "coverage", CELL_KEYS + ("cdf_min", "cdf_max", "cdf_step"))
    write_csv(out / "coverage_cdf.csv", ["threshold_db", "coverage"], coverage_cdf_rows(cell, grid), rec)
    print("coverage  threshold_db")
    for p in table:
        print(f"{p.coverage:8.0%}  {p.threshold_db:12.2f}")
    print(f"wrote {out / 'coverage_table.csv'} and {out / 'coverage_cdf.csv'}")
    return EXIT_OK


def _sweep_setup(cfg: dict):
    cell = _cell(cfg)
    t_grid = _grid(cfg, "t")
    alpha_grid = _grid(cfg, "alpha")
    if alpha_grid[0] < 0:
        raise ConfigError("alpha_grid.min must be >= 0")
    if t_grid[0] < 0:
        raise ConfigError("t_grid.min must be >= 0")
    strategies = list(cfg["strategies"])
    bad = sorted(set(strategies) - set(STRATEGIES))
    if bad or not strategies:
        raise ConfigError(f"strategies: unknown or empty selection {bad or strategies}; "
                          f"choose from {', '.join(STRATEGIES)}")
    return cell, t_grid, alpha_grid, strategies


SWEEP_KEYS = CELL_KEYS + ("t_min", "t_max", "t_step", "alpha_min", "alpha_max", "alpha_step",
                          "strategies")


def cmd_sweep(cfg: dict) -> int:
    cell, t_grid, alpha_grid, strategies = _sweep_setup(cfg)
    targets = _targets(cfg, cell)
    out = _out_dir(cfg)
    for tg in targets:
        points = sweep(tg, t_grid, strategies, alpha_grid)
        rec = {**_record(cfg, "sweep", SWEEP_KEYS), "g_base": tg.g_base, "g_enh": tg.g_enh}
        path = write_csv(out / f"sweep_gb{_tag(tg.g_base)}_ge{_tag(tg.g_enh)}.csv",
                         SWEEP_COLUMNS, sweep_rows(tg, points), rec)
        print(f"wrote {path}")
    return EXIT_OK


def cmd_compare(cfg: dict) -> int:
    cell, t_grid, alpha_grid, strategies = _sweep_setup(cfg)
    targets = _targets(cfg, cell)
    out = _out_dir(cfg)
    for tg in targets:
        points = sweep(tg, t_grid, strategies, alpha_grid)
        header, rows = compare_rows(list(t_grid), points)
        rec = {**_record(cfg, "compare", SWEEP_KEYS), "g_base": tg.g_base, "g_enh": tg.g_enh}
        path = write_csv(out / f"compare_gb{_tag(tg.g_base)}_ge{_tag(tg.g_enh)}.csv",
                         header, rows, rec)
        wins = {}
        for r in rows:
            wins[r[-2]] = wins.get(r[-2], 0) + 1
        summary = ", ".join(f"{k}: {v}" for k, v in sorted(wins.items()))
        print(f"({tg.g_base:.0%}, {tg.g_enh:.0%}) winners per t -> {summary}")
        print(f"wrote {path}")
    return EXIT_OK


def cmd_validate(cfg: dict) -> int:
    cell = _cell(cfg)
    for k in ("capacity_points", "capacity_draws", "coverage_draws", "allocation_instances"):
        if not isinstance(cfg[k], int) or cfg[k] < 1:
            raise ConfigError(f"{k} must be a positive integer")
    checks = run_all(cell, seed=int(cfg["seed"]), capacity_points=cfg["capacity_points"],
                     capacity_draws=cfg["capacity_draws"], coverage_draws=cfg["coverage_draws"],
                     allocation_instances=cfg["allocation_instances"])
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


COMMANDS = {
    "capacity": cmd_capacity,
    "coverage": cmd_coverage,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "validate": cmd_validate,
}


def _csv_floats(s: str) -> list[float]:
    return [float(v) for v in s.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with settings (flags override it)")
    common.add_argument("-o", "--output", help=f"output directory (default ${OUTPUT_ENV} or .)")
    cell = common.add_argument_group("cell model")
    cell.add_argument("--intercept-db", type=float)
    cell.add_argument("--slope", type=float)
    cell.add_argument("--sigma-db", type=float)
    cell.add_argument("--radius-km", type=float)

    targets = argparse.ArgumentParser(add_help=False)
    targets.add_argument("--g-base", type=float, help="base stream coverage fraction")
    targets.add_argument("--g-enh", type=float, help="enhanced stream coverage fraction")
    targets.add_argument("--t-min", type=float)
    targets.add_argument("--t-max", type=float)
    targets.add_argument("--t-step", type=float)
    targets.add_argument("--alpha-min", type=float)
    targets.add_argument("--alpha-max", type=float)
    targets.add_argument("--alpha-step", type=float)
    targets.add_argument("--strategies", type=lambda s: [v for v in s.split(",") if v],
                         help=f"comma list from {','.join(STRATEGIES)}")

    p = argparse.ArgumentParser(prog="bdmqam",
                                description="Spectral efficiency vs coverage of broadcast "
                                            "allocation strategies on 16-QAM.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    cap = sub.add_parser("capacity", parents=[common], help="per-bit capacity curves")
    cap.add_argument("--alphas", type=_csv_floats, help="comma list of alpha values")
    cap.add_argument("--esn0-min", type=float)
    cap.add_argument("--esn0-max", type=float)
    cap.add_argument("--esn0-step", type=float)

    cov = sub.add_parser("coverage", parents=[common], help="coverage thresholds and CDF")
    cov.add_argument("--cdf-min", type=float)
    cov.add_argument("--cdf-max", type=float)
    cov.add_argument("--cdf-step", type=float)

    sub.add_parser("sweep", parents=[common, targets], help="strategy curves per target pair")
    sub.add_parser("compare", parents=[common, targets], help="winning strategy at each t")

    val = sub.add_parser("validate", parents=[common], help="oracle cross-checks")
    val.add_argument("--seed", type=int)
    val.add_argument("--capacity-points", type=int)
    val.add_argument("--capacity-draws", type=int)
    val.add_argument("--coverage-draws", type=int)
    val.add_argument("--allocation-instances", type=int)
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config is not None:
        try:
            loaded = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config: top level must be an object")
        unknown = sorted(set(loaded) - set(DEFAULTS))
        if unknown:
            raise ConfigError(f"config: unknown keys {unknown}")
        cfg.update(loaded)
    for key, val in vars(args).items():
        if key in DEFAULTS and val is not None:
            cfg[key] = val
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
