"""Run configuration: a JSON document, ``--set key=value`` overrides, defaults.

Precedence is flag > file > built-in default.  Every key is optional.  Example::

    {
      "cost": {"dram_usd_per_gb": 5.5, "processor_usd_per_node": 400, "misc_usd_per_node": 1000},
      "technologies": {"Flash": {"usd_per_gb": 0.18}},
      "compare": ["3DXP", "Flash"],
      "server": {"max_dram_gb_per_node": 1024, "max_nodes": 1024},
      "workload": {"read_fraction": 0.5},
      "simulation": {"n_keys": 1000000, "t_cpu_us": 10, "seed": 0, "sweep": [0.01, 0.1, 1.0]},
      "profiles": {"source": "simulate"},
      "grid": {"capacity_gb": [5000, 60000, 12], "throughput_tps": [10000, 200000, 20]},
      "extra_cost_e": 0.0,
      "trend": {"observations": [[0, 1000, 20000], [1, 11000, 40000]],
                "horizon_years": 5, "mode": "through_origin"},
      "sensitivity": {"parameter": "tech2_price", "values": [0.2, 0.15, 0.1]},
      "output_dir": "tracar-out"
    }

``technologies`` entries are merged by name onto the built-in 3DXP and Flash
definitions; a new name must give every field.
"""
from __future__ import annotations

import copy
import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .model import (
    FLASH,
    XPOINT,
    CostBook,
    InvalidArgumentError,
    ServerModel,
    StorageTechnology,
    WorkloadMix,
    pick_pair,
)
from .planner import DemandGrid, linspace
from .simulator import DEFAULT_SWEEP, SimParams

OUTPUT_ENV = "TRACAR_OUTPUT_DIR"
DEFAULT_OUTPUT = "tracar-out"
PROFILE_SOURCES = ("simulate", "fixture-f1", "files")


class ConfigError(ValueError):
    pass


DEFAULTS: Dict[str, Any] = {
    "cost": {"dram_usd_per_gb": 5.5, "processor_usd_per_node": 400.0, "misc_usd_per_node": 1000.0},
    "technologies": {t.name: dataclasses.asdict(t) for t in (XPOINT, FLASH)},
    "compare": ["3DXP", "Flash"],
    "server": dataclasses.asdict(ServerModel()),
    "workload": dataclasses.asdict(WorkloadMix()),
    "simulation": {"n_keys": 1_000_000, "t_cpu_us": 10.0, "seed": 0, "sweep": list(DEFAULT_SWEEP), "node_pages": 1},
    "profiles": {"source": "simulate", "files": {}},
    "grid": {"capacity_gb": [5000.0, 60000.0, 12], "throughput_tps": [10000.0, 200000.0, 20]},
    "extra_cost_e": 0.0,
    "trend": {
        "observations": [[0.0, 1000.0, 20000.0], [1.0, 11000.0, 40000.0]],
        "horizon_years": 5,
        "mode": "through_origin",
        "breakpoint_ratio": None,
    },
    "sensitivity": {"parameter": "tech2_price", "values": [0.2, 0.15, 0.1, 0.05]},
    "output_dir": None,
}

# sections whose keys are free-form names rather than a fixed schema
_OPEN_SECTIONS = {"technologies", "profiles.files"}


@dataclass(frozen=True)
class RunConfig:
    book: CostBook
    tech1: StorageTechnology
    tech2: StorageTechnology
    server: ServerModel
    workload: WorkloadMix
    sim: SimParams
    profile_source: str
    profile_files: Dict[str, Path]
    grid: DemandGrid
    extra_cost_e: float
    observations: Tuple[Tuple[float, float, float], ...]
    horizon_years: float
    mode: str
    breakpoint_ratio: Optional[float]
    sweep_parameter: str
    sweep_values: Tuple[float, ...]
    output_dir: Path
    raw: Dict[str, Any]


def parse_override(item: str) -> Tuple[List[str], Any]:
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not key=value")
    key, _, text = item.partition("=")
    path = [p for p in key.strip().split(".") if p]
    if not path:
        raise ConfigError(f"override {item!r} has an empty key")
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    return path, value


def _merge(base: Dict[str, Any], update: Mapping[str, Any], where: str = "") -> None:
    for key, value in update.items():
        here = f"{where}.{key}" if where else key
        if key not in base and where not in _OPEN_SECTIONS:
            raise ConfigError(f"unknown config key {here!r}")
        if isinstance(value, Mapping) and isinstance(base.get(key), dict):
            _merge(base[key], value, here)
        else:
            base[key] = copy.deepcopy(value)


def load_document(path: Optional[Path], overrides: Sequence[str] = ()) -> Tuple[Dict[str, Any], Path]:
    doc = copy.deepcopy(DEFAULTS)
    base_dir = Path.cwd()
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
        try:
            user = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(user, dict):
            raise ConfigError(f"{path}: top level must be an object")
        _merge(doc, user)
        base_dir = Path(path).resolve().parent
    for item in overrides:
        keys, value = parse_override(item)
        update: Dict[str, Any] = value
        for k in reversed(keys):
            update = {k: update}
        _merge(doc, update)
    return doc, base_dir


def _axis(spec, name: str) -> Tuple[float, ...]:
    """``[min, max, steps]``, ``{"min", "max", "steps"}`` or ``{"values": [...]}``."""
    if isinstance(spec, Mapping) and "values" in spec:
        return tuple(float(v) for v in spec["values"])
    if isinstance(spec, Mapping):
        spec = [spec.get("min"), spec.get("max"), spec.get("steps")]
    if not isinstance(spec, list) or len(spec) != 3:
        raise ConfigError(f"grid.{name} must be [min, max, steps]")
    lo, hi, steps = spec
    if int(steps) < 1 or (int(steps) > 1 and not float(hi) > float(lo)):
        raise ConfigError(f"grid.{name} needs max > min and steps >= 1")
    return linspace(float(lo), float(hi), int(steps))


def resolve(doc: Dict[str, Any], base_dir: Path, output_flag: Optional[str] = None) -> RunConfig:
    try:
        return _resolve(doc, base_dir, output_flag)
    except ConfigError:
        raise
    except (InvalidArgumentError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def _resolve(doc: Dict[str, Any], base_dir: Path, output_flag: Optional[str]) -> RunConfig:
    techs = []
    for name, fields in doc["technologies"].items():
        fields = dict(fields)
        fields.setdefault("name", name)
        if fields["name"] != name:
            raise ConfigError(f"technology key {name!r} disagrees with its name field")
        techs.append(StorageTechnology(**fields))
    book = CostBook(technologies=tuple(techs), **doc["cost"])
    tech1, tech2 = pick_pair(book, doc["compare"])

    source = doc["profiles"]["source"]
    if source not in PROFILE_SOURCES:
        raise ConfigError(f"profiles.source must be one of {PROFILE_SOURCES}")
    files = {k: (base_dir / v) for k, v in doc["profiles"].get("files", {}).items()}
    if source == "files":
        missing = {tech1.name, tech2.name} - set(files)
        if missing:
            raise ConfigError(f"profiles.files lacks {sorted(missing)}")

    sim_doc = dict(doc["simulation"])
    sim_doc["sweep"] = tuple(float(f) for f in sim_doc["sweep"])
    if not sim_doc["sweep"]:
        raise ConfigError("simulation.sweep is empty")
    sim = SimParams(**sim_doc)

    caps = _axis(doc["grid"]["capacity_gb"], "capacity_gb")
    thrs = _axis(doc["grid"]["throughput_tps"], "throughput_tps")
    trend = doc["trend"]
    obs = tuple(tuple(float(x) for x in row) for row in trend["observations"])
    if any(len(row) != 3 for row in obs):
        raise ConfigError("trend.observations rows must be [t_years, capacity_gb, throughput_tps]")
    if trend["mode"] not in ("through_origin", "affine"):
        raise ConfigError("trend.mode must be through_origin or affine")
    sens = doc["sensitivity"]

    out = output_flag or doc.get("output_dir") or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT
    out_path = Path(out)
    if not out_path.is_absolute() and output_flag is None and doc.get("output_dir"):
        out_path = base_dir / out_path
    e = float(doc["extra_cost_e"])
    if e < 0:
        raise ConfigError("extra_cost_e must be >= 0")
    bp = trend.get("breakpoint_ratio")
    return RunConfig(
        book=book,
        tech1=tech1,
        tech2=tech2,
        server=ServerModel(**doc["server"]),
        workload=WorkloadMix(**doc["workload"]),
        sim=sim,
        profile_source=source,
        profile_files=files,
        grid=DemandGrid(caps, thrs),
        extra_cost_e=e,
        observations=obs,
        horizon_years=float(trend["horizon_years"]),
        mode=trend["mode"],
        breakpoint_ratio=None if bp is None else float(bp),
        sweep_parameter=str(sens["parameter"]),
        sweep_values=tuple(float(v) for v in sens["values"]),
        output_dir=out_path,
        raw=doc,
    )


def load_config(
    path: Optional[Path] = None, overrides: Sequence[str] = (), output_flag: Optional[str] = None
) -> RunConfig:
    doc, base_dir = load_document(path, overrides)
    return resolve(doc, base_dir, output_flag)
