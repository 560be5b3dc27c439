"""Versioned flat-file format for throughput profiles.

Layout::

    # tracar-profile 1.0
    technology,read_fraction,memory_fraction,faults_per_txn,tps_per_node,seed,provenance
    3DXP,0.5,0.005,0.61,104712.04,0,simulated
    ...

Floats use their shortest round-trip repr, so a profile survives a write/read
cycle bit for bit.  ``faults_per_txn`` may be empty for measured fixtures.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import List, Union

from .model import WorkloadMix
from .simulator import MEASURED, SIMULATED, ThroughputProfile

MAGIC = "# tracar-profile"
VERSION = (1, 0)
COLUMNS = [
    "technology",
    "read_fraction",
    "memory_fraction",
    "faults_per_txn",
    "tps_per_node",
    "seed",
    "provenance",
]


class ProfileFormatError(ValueError):
    pass


def dumps_profile(profile: ThroughputProfile) -> str:
    buf = io.StringIO()
    buf.write(f"{MAGIC} {VERSION[0]}.{VERSION[1]}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    faults = profile.faults or (None,) * len(profile.points)
    for (f, tps), fault in zip(profile.points, faults):
        w.writerow([
            profile.technology,
            repr(float(profile.workload.read_fraction)),
            repr(float(f)),
            "" if fault is None else repr(float(fault)),
            repr(float(tps)),
            profile.seed,
            profile.provenance,
        ])
    return buf.getvalue()


def loads_profile(text: str) -> ThroughputProfile:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(MAGIC):
        raise ProfileFormatError("missing tracar-profile header line")
    try:
        major = int(lines[0][len(MAGIC):].strip().split(".")[0])
    except ValueError as exc:
        raise ProfileFormatError(f"bad version in header {lines[0]!r}") from exc
    if major != VERSION[0]:
        raise ProfileFormatError(f"unsupported profile major version {major}")
    rows = list(csv.DictReader(lines[1:]))
    if not rows:
        raise ProfileFormatError("profile has no data rows")
    missing = set(COLUMNS) - set(rows[0])
    if missing:
        raise ProfileFormatError(f"missing columns: {sorted(missing)}")

    techs = {r["technology"] for r in rows}
    reads = {r["read_fraction"] for r in rows}
    provs = {r["provenance"] for r in rows}
    seeds = {r["seed"] for r in rows}
    if len(techs) != 1 or len(reads) != 1 or len(provs) != 1 or len(seeds) != 1:
        raise ProfileFormatError("a profile file must hold one technology/workload/seed")
    prov = provs.pop()
    if prov not in (SIMULATED, MEASURED):
        raise ProfileFormatError(f"unknown provenance {prov!r}")
    try:
        points = [(float(r["memory_fraction"]), float(r["tps_per_node"])) for r in rows]
        faults = [r["faults_per_txn"] for r in rows]
        fault_vals = tuple(float(x) for x in faults) if all(faults) else ()
        read_fraction = float(reads.pop())
        seed = int(seeds.pop())
    except ValueError as exc:
        raise ProfileFormatError(str(exc)) from exc
    if fault_vals:
        # keep faults aligned with the sorted point order
        order = sorted(range(len(points)), key=lambda i: points[i][0])
        fault_vals = tuple(fault_vals[i] for i in order)
    return ThroughputProfile(
        technology=techs.pop(),
        workload=WorkloadMix(read_fraction=read_fraction),
        points=tuple(points),
        provenance=prov,
        seed=seed,
        faults=fault_vals,
    )


def load_profile(path: Union[str, Path]) -> ThroughputProfile:
    return loads_profile(Path(path).read_text(encoding="utf-8"))


def load_profiles(paths) -> List[ThroughputProfile]:
    return [load_profile(p) for p in paths]
