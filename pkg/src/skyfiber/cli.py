"""Command-line front end.

Subcommands::

    skyfiber crossover --h 550 --i 1.5 --scenario 1
    skyfiber sweep --kind function --h 550 --i 1.5 --theta-range 1 180 0.5
    skyfiber simulate [CONFIG] --connection Toronto-Sydney --owsn OWSN3 --out runs/
    skyfiber compare [CONFIG] --format csv
    skyfiber verify [FIXTURES_DIR] --only table1

Exit status: 0 on success, 1 on a runtime or validation failure, 2 on a
usage error.  Kilometres are printed as integers and milliseconds with two
decimals, the same rounding the reference tables use.

CSV schemas
-----------
crossover, one scenario:  h_km,i,r_gs_km,theta_deg,d_km
crossover, all scenarios: h_km,i,r_gs_km,s1_theta_deg,s1_d_km,...,s4_d_km,avg_d_km
sweep --kind function:    h_km,i,scenario,theta_deg,f
sweep --kind distance:    same as crossover, all scenarios
simulate (per slot):      slot,latency_ms,length_km,lisl_count,path
compare:                  connection,distance_km,<network>...,<owsn>_vs_<oftn>_pct...
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .compare import run_comparison
from .config import ConfigError, ExperimentConfig, load_config
from .constellation import GroundStation
from .crossover import (
    CrossoverQuery,
    Scenario,
    emit_crossover_tables,
    function_sweep,
    solve_crossover,
)
from .geo import EARTH
from .linkgraph import simulate_connection
from .verify import TABLES, run_verify

log = logging.getLogger("skyfiber")

MISSING = "—"
SIDEREAL_DAY_S = 86164.0905


class CliError(Exception):
    """A runtime failure reported on stderr with exit status 1."""


# -- argument parsing -------------------------------------------------------


def _number_list(text: str) -> list[float]:
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number or comma-separated list of numbers: {text!r}") from None
    if not values or not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {text!r}")
    return values


def _flatten(groups) -> list[float]:
    return [v for g in groups for v in g]


def _grid(spec: list[float], what: str, parser: argparse.ArgumentParser) -> list[float]:
    start, stop, step = spec
    if step <= 0 or stop < start:
        parser.error(f"{what}: need start <= stop and a positive step")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 10) for k in range(n)]


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", nargs="?", help="experiment YAML (default: the reference experiment)")
    p.add_argument("--slots", type=int, help="number of time slots (overrides simulation.duration_s)")
    when = p.add_mutually_exclusive_group()
    when.add_argument("--epoch", type=float, help="constellation epoch offset in seconds")
    when.add_argument("--seed", type=int, help="draw a reproducible random epoch offset within one sidereal day")
    p.add_argument("--workers", type=int, help="processes used for the slot loop")
    p.add_argument("--dump-config", metavar="PATH", help="write the effective config ('-' for stdout) and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skyfiber", description="Fibre versus satellite latency tools.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crossover", help="crossover angle and distance for altitude/index pairs")
    p.add_argument("--h", type=_number_list, action="append", required=True, metavar="KM", help="altitude(s) in km")
    p.add_argument("--i", type=_number_list, action="append", required=True, metavar="N", help="refractive index(es)")
    which = p.add_mutually_exclusive_group()
    which.add_argument("--scenario", type=int, choices=[1, 2, 3, 4])
    which.add_argument("--all-scenarios", action="store_true", help="all four scenarios plus their average (default)")
    p.add_argument("--epsilon", type=float, default=25.0, help="minimum elevation in degrees for scenarios 2-4")
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p.add_argument("--sweep", action="store_true", help="emit the crossover function over --theta-range instead")
    p.add_argument("--theta-range", type=float, nargs=3, default=[0.5, 180.0, 0.5], metavar=("START", "STOP", "STEP"))
    p.set_defaults(func=cmd_crossover, parser=p)

    p = sub.add_parser("sweep", help="CSV sweeps for plotting")
    p.add_argument("--kind", choices=["function", "distance"], default="function")
    p.add_argument("--h", type=_number_list, action="append", metavar="KM")
    p.add_argument("--i", type=_number_list, action="append", metavar="N")
    p.add_argument("--h-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    p.add_argument("--i-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    p.add_argument("--scenario", type=int, choices=[1, 2, 3, 4], action="append")
    p.add_argument("--epsilon", type=float, default=25.0)
    p.add_argument("--theta-range", type=float, nargs=3, default=[0.5, 180.0, 0.5], metavar=("START", "STOP", "STEP"))
    p.add_argument("--format", choices=["text", "csv", "json"], default="csv")
    p.set_defaults(func=cmd_sweep, parser=p)

    p = sub.add_parser("simulate", help="route one connection over one satellite network, slot by slot")
    _add_run_options(p)
    p.add_argument("--connection", help="connection name (default: first in config)")
    p.add_argument("--owsn", help="satellite network name (default: first in config)")
    p.add_argument("--emit-paths", action="store_true", help="fill the path column of the per-slot CSV")
    p.add_argument("--out", default=".", help="output directory (default: current directory)")
    p.set_defaults(func=cmd_simulate, parser=p)

    p = sub.add_parser("compare", help="latency matrix of every connection over every network")
    _add_run_options(p)
    p.add_argument("--format", choices=["text", "csv", "json"], help="default: config output_format")
    p.set_defaults(func=cmd_compare, parser=p)

    p = sub.add_parser("verify", help="regenerate the reference tables and diff them against CSV fixtures")
    p.add_argument("fixtures_dir", nargs="?", help="fixture directory (default: bundled)")
    p.add_argument("--only", action="append", metavar="TABLE", help=f"subset of {', '.join(TABLES)}")
    p.add_argument("--all", action="store_true", help="print passing cells too")
    p.set_defaults(func=cmd_verify, parser=p)
    return parser


# -- output helpers ----------------------------------------------------------


def _km(x: float | None):
    return None if x is None else int(round(x))


def _deg(x: float | None):
    return None if x is None else round(x, 4)


def _cell(column: str, v) -> str:
    if v is None:
        return MISSING
    if isinstance(v, float):
        if column.endswith("theta_deg"):
            return f"{v:.4f}"
        if column.endswith("_ms") or column.endswith("_pct"):
            return f"{v:.2f}"
        if column == "f":
            return f"{v:.6f}"
        return f"{v:g}"
    return str(v)


def _emit(rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        json.dump(rows, out, indent=2, ensure_ascii=False)
        out.write("\n")
        return
    if not rows:
        return
    cols = list(rows[0])
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(cols)
        w.writerows([[_cell(c, r[c]) for c in cols] for r in rows])
        return
    table = [cols] + [[_cell(c, r[c]) for c in cols] for r in rows]
    widths = [max(len(row[k]) for row in table) for k in range(len(cols))]
    for row in table:
        out.write("  ".join(v.rjust(w) for v, w in zip(row, widths)).rstrip() + "\n")


def _crossover_rows(h_list, i_list, scenario: int | None, epsilon: float) -> list[dict]:
    rows = []
    if scenario is not None:
        s = Scenario(scenario)
        for h in h_list:
            for i in i_list:
                r = solve_crossover(CrossoverQuery(h, i, 90.0 if s is Scenario.S1 else epsilon, s))
                rows.append({
                    "h_km": h, "i": i, "r_gs_km": _km(r.gs_range_km),
                    "theta_deg": _deg(r.theta_crossover_deg), "d_km": _km(r.distance_crossover_km),
                })
        return rows
    for t in emit_crossover_tables(h_list, i_list, EARTH, epsilon):
        row = {"h_km": t.altitude_km, "i": t.refractive_index, "r_gs_km": _km(t.gs_range_km)}
        for s in Scenario:
            r = t.results[s]
            row[f"s{s.value}_theta_deg"] = _deg(r.theta_crossover_deg)
            row[f"s{s.value}_d_km"] = _km(r.distance_crossover_km)
        row["avg_d_km"] = _km(t.average_d_crossover_km)
        rows.append(row)
    return rows


def _function_rows(h_list, i_list, scenarios, epsilon, thetas) -> list[dict]:
    rows = []
    for h in h_list:
        for i in i_list:
            for s in scenarios:
                q = CrossoverQuery(h, i, 90.0 if s is Scenario.S1 else epsilon, s)
                for th, f in function_sweep(q, thetas):
                    rows.append({"h_km": h, "i": i, "scenario": s.value, "theta_deg": th, "f": round(f, 6)})
    return rows


def _check_physical(parser, h_list, i_list, epsilon) -> None:
    if any(h <= 0 for h in h_list):
        parser.error("--h: altitudes must be positive")
    if any(i < 1.0 for i in i_list):
        parser.error("--i: refractive indices must be >= 1")
    if not 0.0 <= epsilon <= 90.0:
        parser.error("--epsilon: must lie in [0, 90]")


# -- subcommands -------------------------------------------------------------


def cmd_crossover(args, out) -> int:
    h_list, i_list = _flatten(args.h), _flatten(args.i)
    _check_physical(args.parser, h_list, i_list, args.epsilon)
    if args.sweep:
        scenarios = [Scenario(args.scenario)] if args.scenario else list(Scenario)
        thetas = _grid(args.theta_range, "--theta-range", args.parser)
        rows = _function_rows(h_list, i_list, scenarios, args.epsilon, thetas)
    else:
        rows = _crossover_rows(h_list, i_list, args.scenario, args.epsilon)
    _emit(rows, args.format, out)
    return 0


def cmd_sweep(args, out) -> int:
    p = args.parser
    h_list = _flatten(args.h or []) + (_grid(args.h_range, "--h-range", p) if args.h_range else [])
    i_list = _flatten(args.i or []) + (_grid(args.i_range, "--i-range", p) if args.i_range else [])
    if not h_list or not i_list:
        p.error("give at least one altitude (--h/--h-range) and one index (--i/--i-range)")
    _check_physical(p, h_list, i_list, args.epsilon)
    if args.kind == "function":
        scenarios = [Scenario(s) for s in args.scenario] if args.scenario else [Scenario.S1]
        rows = _function_rows(h_list, i_list, scenarios, args.epsilon, _grid(args.theta_range, "--theta-range", p))
    else:
        if args.scenario and len(args.scenario) == 1:
            rows = _crossover_rows(h_list, i_list, args.scenario[0], args.epsilon)
        else:
            rows = _crossover_rows(h_list, i_list, None, args.epsilon)
    _emit(rows, args.format, out)
    return 0


def _effective_config(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    sim = cfg.simulation
    changes = {}
    if args.slots is not None:
        if args.slots < 1:
            args.parser.error("--slots: must be at least 1")
        changes["duration_s"] = args.slots * sim.dt_s
    if args.epoch is not None:
        if args.epoch < 0:
            args.parser.error("--epoch: must be non-negative")
        changes["epoch_offset_s"] = args.epoch
    if args.seed is not None:
        rng = np.random.default_rng(args.seed)
        changes["epoch_offset_s"] = round(float(rng.uniform(0.0, SIDEREAL_DAY_S)), 3)
    if args.workers is not None:
        if args.workers < 1:
            args.parser.error("--workers: must be at least 1")
        changes["workers"] = args.workers
    cfg.simulation = dataclasses.replace(sim, **changes)
    return cfg


def _dump(cfg: ExperimentConfig, target: str, out) -> int:
    text = cfg.dump()
    if target == "-":
        out.write(text)
    else:
        Path(target).write_text(text)
    return 0


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", text).strip("_")


def cmd_simulate(args, out) -> int:
    cfg = _effective_config(args)
    if args.dump_config:
        return _dump(cfg, args.dump_config, out)
    if not cfg.connections or not cfg.owsns:
        raise ConfigError("simulate needs at least one connection and one OWSN in the config")
    conn = cfg.find_connection(args.connection) if args.connection else cfg.connections[0]
    net = (cfg.find_owsn(args.owsn) if args.owsn else cfg.owsns[0]).resolved(cfg.earth)
    catalog = cfg.city_catalog()
    stations = tuple(
        GroundStation(name, catalog[name], net.gs_range_km, net.min_elevation_deg) for name in (conn.city_a, conn.city_b)
    )
    sim = cfg.simulation
    log.info("simulating %s over %s for %g s", conn.name, net.name, sim.duration_s)
    series = simulate_connection(
        sim.walker(net.altitude_km), stations, net.lisl_range_km, sim.duration_s, sim.dt_s, cfg.earth, sim.workers
    )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{_slug(conn.name)}_{_slug(net.name)}"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["slot", "latency_ms", "length_km", "lisl_count", "path"])
    for k, r in enumerate(series.results):
        if r is None:
            w.writerow([k, "", "", "", ""])
        else:
            path = ">".join(r.nodes) if args.emit_paths else ""
            w.writerow([k, f"{r.total_latency_ms:.2f}", _km(r.total_length_km), r.lisl_count, path])
    (out_dir / f"{stem}_slots.csv").write_text(buf.getvalue())

    summary = series.summary()
    mean = summary["mean_latency_ms"]
    summary["mean_latency_ms"] = None if math.isnan(mean) else round(mean, 2)
    summary.update(connection=conn.name, owsn=net.name, altitude_km=net.altitude_km,
                   dt_s=sim.dt_s, epoch_offset_s=sim.epoch_offset_s)
    (out_dir / f"{stem}_summary.json").write_text(json.dumps(summary, indent=2) + "\n")

    if summary["mean_latency_ms"] is None:
        raise CliError(f"{conn.name} over {net.name}: no slot had a path")
    out.write(
        f"{conn.name} over {net.name}: mean {summary['mean_latency_ms']:.2f} ms over "
        f"{series.slot_count - series.unreachable_count}/{series.slot_count} slots; "
        f"LISL histogram {summary['lisl_histogram']}\n"
    )
    return 0


def cmd_compare(args, out) -> int:
    cfg = _effective_config(args)
    if args.dump_config:
        return _dump(cfg, args.dump_config, out)
    fmt = args.format or cfg.output_format
    report = run_comparison(cfg.connections, cfg.oftns, cfg.owsns, cfg.simulation, cfg.city_catalog(), cfg.earth)
    if fmt == "text":
        out.write(report.render_text() + "\n")
    else:
        _emit(report.rows(), fmt, out)
    if report.warning_count:
        print(f"{report.warning_count} warning(s)", file=sys.stderr)
    return 0


def cmd_verify(args, out) -> int:
    only = [t for group in (args.only or []) for t in group.split(",") if t]
    bad = [t for t in only if t not in TABLES]
    if bad:
        args.parser.error(f"--only: unknown table(s) {', '.join(bad)}; choose from {', '.join(TABLES)}")
    checks = run_verify(args.fixtures_dir, only or None)
    for c in checks:
        if args.all or c.status != "pass":
            out.write(c.line() + "\n")
    tables = dict.fromkeys(c.table for c in checks)
    for t in tables:
        mine = [c for c in checks if c.table == t]
        n_fail = sum(not c.ok for c in mine)
        n_known = sum(c.status == "known" for c in mine)
        state = "FAIL" if n_fail else "ok"
        out.write(f"{t}: {state} ({len(mine) - n_fail} of {len(mine)} cells, {n_known} known deviations)\n")
    return 1 if any(not c.ok for c in checks) else 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args, sys.stdout)
    except (ConfigError, CliError, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
