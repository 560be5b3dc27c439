"""``tracar`` command line: profile, plan, breakpoint, recommend, sensitivity.

Exit codes: 0 ok, 2 configuration error, 3 infeasible demand, 4 I/O failure,
1 anything else.  Failures print one ``tracar: error=<kind> message="..."`` line
on stderr.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import report
from .advisor import Observation, extrapolate, fit_trend, recommend, server_schedule
from .breakpoint import (
    NONE,
    BreakpointLine,
    PipelineInputs,
    compute_tracar,
    sensitivity_sweep,
)
from .config import ConfigError, RunConfig, load_config
from .fixtures import f1_profiles
from .model import InvalidArgumentError
from .planner import DemandGrid, InfeasibleDemandError, plan_grid
from .profile_io import ProfileFormatError, dumps_profile, load_profile
from .simulator import ThroughputProfile, profiles_for

logger = logging.getLogger("tracar")

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3, 4
COMMANDS = ("profile", "plan", "breakpoint", "recommend", "sensitivity")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tracar",
        description="Pick a secondary-storage technology and server setup from a growth trend.",
    )
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("-c", "--config", type=Path, default=None, help="JSON run configuration")
    ap.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override a config value by dotted key, e.g. --set simulation.seed=3",
    )
    ap.add_argument("-o", "--output", default=None, help="output directory (env TRACAR_OUTPUT_DIR)")
    ap.add_argument("-j", "--jobs", type=int, default=1, help="worker processes")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _profiles(cfg: RunConfig) -> Dict[str, ThroughputProfile]:
    names = (cfg.tech1.name, cfg.tech2.name)
    if cfg.profile_source == "fixture-f1":
        fixture = f1_profiles(cfg.workload)
        missing = set(names) - set(fixture)
        if missing:
            raise ConfigError(f"fixture F1 has no profile for {sorted(missing)}")
        return {n: fixture[n] for n in names}
    if cfg.profile_source == "files":
        out = {}
        for n in names:
            prof = load_profile(cfg.profile_files[n])
            if prof.technology != n:
                raise ConfigError(f"{cfg.profile_files[n]} holds a profile for {prof.technology}, not {n}")
            out[n] = prof
        return out
    sim = dataclasses.replace(cfg.sim, jobs=max(1, cfg.sim.jobs))
    profs = profiles_for(cfg.workload, (cfg.tech1, cfg.tech2), sim)
    return {p.technology: p for p in profs}


def _inputs(cfg: RunConfig, profiles, jobs: int) -> PipelineInputs:
    return PipelineInputs(
        demand=cfg.grid,
        tech1=cfg.tech1,
        tech2=cfg.tech2,
        profiles=profiles,
        server=cfg.server,
        book=cfg.book,
        extra_cost_e=cfg.extra_cost_e,
        jobs=jobs,
    )


def cmd_profile(cfg: RunConfig, jobs: int) -> Dict[str, str]:
    return {f"profile-{name}.csv": dumps_profile(p) for name, p in _profiles(cfg).items()}


def cmd_plan(cfg: RunConfig, jobs: int) -> Dict[str, str]:
    profiles = _profiles(cfg)
    out = {}
    for tech in (cfg.tech1, cfg.tech2):
        g = plan_grid(cfg.grid, tech, profiles[tech.name], cfg.server, cfg.book, jobs)
        out[f"setup-grid-{tech.name}.csv"] = report.setup_grid_csv(g)
    return out


def cmd_breakpoint(cfg: RunConfig, jobs: int) -> Dict[str, str]:
    g1, g2, line = compute_tracar(_inputs(cfg, _profiles(cfg), jobs))
    return {
        "classification.csv": report.classification_csv(g1, g2, line),
        "crossings.csv": report.crossings_csv(line),
        "breakpoint.json": report.dumps_json(report.breakpoint_doc(line)),
    }


def cmd_recommend(cfg: RunConfig, jobs: int) -> Dict[str, str]:
    profiles = _profiles(cfg)
    trend = fit_trend([Observation(*row) for row in cfg.observations])
    demand = extrapolate(trend, cfg.horizon_years, cfg.mode)
    if cfg.breakpoint_ratio is None:
        g1, g2, line = compute_tracar(_inputs(cfg, profiles, jobs))
    else:
        point = DemandGrid((demand.capacity_gb,), (demand.throughput_tps,))
        g1 = plan_grid(point, cfg.tech1, profiles[cfg.tech1.name], cfg.server, cfg.book)
        g2 = plan_grid(point, cfg.tech2, profiles[cfg.tech2.name], cfg.server, cfg.book)
        line = BreakpointLine(
            ratio_khz_per_tb=cfg.breakpoint_ratio,
            per_capacity_crossings=(),
            extra_cost_e=cfg.extra_cost_e,
            degenerate=NONE,
            premium=cfg.tech1.name,
            other=cfg.tech2.name,
            fit_method="given in configuration",
        )
    rec = recommend(trend, line, demand, g1, g2)
    chosen = cfg.tech1 if rec.chosen_technology == cfg.tech1.name else cfg.tech2
    years = max(1, int(round(cfg.horizon_years)))
    schedule = server_schedule(trend, years, chosen, profiles[chosen.name], cfg.server, cfg.book)
    doc = report.recommendation_doc(rec, cfg.mode, cfg.horizon_years)
    doc["breakpoint"] = report.breakpoint_doc(line)
    doc["trend"] = {
        "ratio_khz_per_tb": trend.ratio_khz_per_tb,
        "capacity_growth_gb_per_year": trend.capacity_growth_gb_per_year,
        "throughput_growth_tps_per_year": trend.throughput_growth_tps_per_year,
        "base": dataclasses.asdict(trend.base),
    }
    return {
        "recommendation.txt": report.recommendation_text(rec, cfg.mode, cfg.horizon_years),
        "recommendation.json": report.dumps_json(doc),
        "schedule.csv": report.schedule_csv(schedule),
    }


def cmd_sensitivity(cfg: RunConfig, jobs: int) -> Dict[str, str]:
    results = sensitivity_sweep(cfg.sweep_parameter, cfg.sweep_values, _inputs(cfg, _profiles(cfg), jobs))
    return {f"sensitivity-{cfg.sweep_parameter}.csv": report.sensitivity_csv(cfg.sweep_parameter, results)}


HANDLERS = {
    "profile": cmd_profile,
    "plan": cmd_plan,
    "breakpoint": cmd_breakpoint,
    "recommend": cmd_recommend,
    "sensitivity": cmd_sensitivity,
}


def _fail(kind: str, exc: BaseException, code: int) -> int:
    msg = " ".join(str(exc).split()).replace('"', "'")
    print(f'tracar: error={kind} message="{msg}"', file=sys.stderr)
    return code


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        cfg = load_config(args.config, args.overrides, args.output)
        cfg = dataclasses.replace(cfg, sim=dataclasses.replace(cfg.sim, jobs=args.jobs))
        outputs = HANDLERS[args.command](cfg, args.jobs)
    except (ConfigError, ProfileFormatError) as exc:
        return _fail("config", exc, EXIT_CONFIG)
    except InfeasibleDemandError as exc:
        return _fail("infeasible", exc, EXIT_INFEASIBLE)
    except OSError as exc:
        return _fail("io", exc, EXIT_IO)
    except InvalidArgumentError as exc:
        return _fail("invalid", exc, EXIT_CONFIG)
    try:
        written: List[Path] = report.write_all(outputs, cfg.output_dir)
    except OSError as exc:
        return _fail("io", exc, EXIT_IO)
    for p in written:
        print(p)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
