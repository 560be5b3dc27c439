"""Cheapest valid cluster configuration per (capacity, throughput) demand."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, Optional, Sequence, Tuple

from .model import (
    CostBook,
    DemandPoint,
    InvalidArgumentError,
    ServerModel,
    SetupCandidate,
    exact,
    StorageTechnology,
    setup_cost,
    validate_setup,
)
from .simulator import ThroughputProfile


class InfeasibleDemandError(RuntimeError):
    def __init__(self, demand: DemandPoint, technology: str, binding: str):
        self.demand = demand
        self.technology = technology
        self.binding = binding
        super().__init__(
            f"{technology}: no setup within limits for {demand.capacity_gb:g} GB at "
            f"{demand.throughput_tps:g} tps (binding constraint: {binding})"
        )


@dataclass(frozen=True)
class DemandGrid:
    capacities_gb: Tuple[float, ...]
    throughputs_tps: Tuple[float, ...]

    def __post_init__(self) -> None:
        for name in ("capacities_gb", "throughputs_tps"):
            axis = tuple(float(v) for v in getattr(self, name))
            object.__setattr__(self, name, axis)
            if not axis:
                raise InvalidArgumentError(f"{name} is empty")
            if any(v <= 0 for v in axis):
                raise InvalidArgumentError(f"{name} must be positive")
            if any(b <= a for a, b in zip(axis, axis[1:])):
                raise InvalidArgumentError(f"{name} must be strictly ascending")

    @classmethod
    def linear(cls, c_min, c_max, c_steps, r_min, r_max, r_steps) -> "DemandGrid":
        return cls(linspace(c_min, c_max, c_steps), linspace(r_min, r_max, r_steps))

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.capacities_gb), len(self.throughputs_tps))

    def cells(self) -> Iterator[Tuple[int, int, DemandPoint]]:
        for i, c in enumerate(self.capacities_gb):
            for j, r in enumerate(self.throughputs_tps):
                yield i, j, DemandPoint(c, r)


def linspace(lo: float, hi: float, steps: int) -> Tuple[float, ...]:
    steps = int(steps)
    if steps < 1:
        raise InvalidArgumentError("grid axes need at least one step")
    if steps == 1:
        return (float(lo),)
    return tuple(lo + (hi - lo) * k / (steps - 1) for k in range(steps))


@dataclass(frozen=True)
class SetupGrid:
    """Cheapest setup per demand cell for one technology; ``None`` = infeasible."""

    demand: DemandGrid
    technology: StorageTechnology
    profile: ThroughputProfile
    server: ServerModel
    book: CostBook
    cells: Tuple[Tuple[Optional[SetupCandidate], ...], ...]

    def cell(self, i: int, j: int) -> Optional[SetupCandidate]:
        return self.cells[i][j]

    def cost(self, i: int, j: int) -> Optional[Fraction]:
        c = self.cells[i][j]
        return None if c is None else c.total_usd


def per_node(demand: DemandPoint, n_nodes: int, fraction: float) -> Tuple[float, float, float]:
    """(dram GB, storage GB, required tps) per node under even sharding."""
    storage = demand.capacity_gb / n_nodes
    return fraction * storage, storage, demand.throughput_tps / n_nodes


def make_candidate(
    demand: DemandPoint,
    n_nodes: int,
    fraction: float,
    tps_per_node: float,
    tech: StorageTechnology,
    book: CostBook,
) -> SetupCandidate:
    dram, storage, _ = per_node(demand, n_nodes, fraction)
    # cost from exact shares, so 60,000 GB over 19 nodes still sums to 60,000 GB
    exact_storage = exact(demand.capacity_gb) / n_nodes
    return SetupCandidate(
        technology=tech.name,
        n_nodes=n_nodes,
        dram_gb_per_node=dram,
        storage_gb_per_node=storage,
        memory_fraction=fraction,
        achieved_tps=n_nodes * tps_per_node,
        cost=setup_cost(n_nodes, exact(fraction) * exact_storage, exact_storage, tech, book),
    )


def is_feasible(
    demand: DemandPoint,
    n_nodes: int,
    fraction: float,
    tps_per_node: float,
    tech: StorageTechnology,
    server: ServerModel,
) -> bool:
    dram, storage, required = per_node(demand, n_nodes, fraction)
    if tps_per_node < required:
        return False
    return (
        dram <= storage
        and dram <= server.max_dram_gb_per_node
        and storage <= tech.max_gb_per_node
        and n_nodes <= server.max_nodes
    )


def _min_nodes(
    demand: DemandPoint,
    fraction: float,
    tps: float,
    tech: StorageTechnology,
    server: ServerModel,
) -> Optional[int]:
    """Smallest node count making ``fraction`` feasible, or None.

    Every constraint is monotone in the node count (more nodes means less
    per-node load, storage, and DRAM), so a closed-form estimate is nudged to the
    exact boundary of the float predicate.
    """
    if fraction > 1.0:
        return None
    n = max(
        1,
        math.ceil(demand.throughput_tps / tps),
        math.ceil(demand.capacity_gb / tech.max_gb_per_node),
        math.ceil(fraction * demand.capacity_gb / server.max_dram_gb_per_node),
    )
    limit = server.max_nodes
    while n > 1 and n - 1 <= limit and is_feasible(demand, n - 1, fraction, tps, tech, server):
        n -= 1
    while n <= limit and not is_feasible(demand, n, fraction, tps, tech, server):
        n += 1
    return n if n <= limit else None


def _binding_constraint(
    demand: DemandPoint, profile: ThroughputProfile, tech: StorageTechnology, server: ServerModel
) -> str:
    n = server.max_nodes
    if demand.throughput_tps / n > profile.max_tps:
        return "throughput"
    if demand.capacity_gb / n > tech.max_gb_per_node:
        return "storage capacity"
    if min(profile.fractions) * demand.capacity_gb / n > server.max_dram_gb_per_node:
        return "dram capacity"
    return "throughput at admissible dram"


def cheapest_setup(
    demand: DemandPoint,
    tech: StorageTechnology,
    profile: ThroughputProfile,
    server: ServerModel,
    book: CostBook,
) -> SetupCandidate:
    """Lowest-cost feasible (nodes, memory fraction); ties go to fewer nodes, then lower fraction.

    For a fixed fraction, total DRAM and storage do not depend on the node count,
    so cost rises with nodes and only the minimal feasible count matters.
    """
    best: Optional[Tuple[Fraction, int, float, SetupCandidate]] = None
    for fraction, tps in profile.points:
        n = _min_nodes(demand, fraction, tps, tech, server)
        if n is None:
            continue
        cand = make_candidate(demand, n, fraction, tps, tech, book)
        key = (cand.total_usd, n, fraction, cand)
        if best is None or key[:3] < best[:3]:
            best = key
    if best is None:
        raise InfeasibleDemandError(demand, tech.name, _binding_constraint(demand, profile, tech, server))
    result = best[3]
    assert validate_setup(result, server, tech).valid
    return result


def _cell(args) -> Optional[SetupCandidate]:
    demand, tech, profile, server, book = args
    try:
        return cheapest_setup(demand, tech, profile, server, book)
    except InfeasibleDemandError:
        return None


def plan_grid(
    grid: DemandGrid,
    tech: StorageTechnology,
    profile: ThroughputProfile,
    server: ServerModel,
    book: CostBook,
    jobs: int = 1,
) -> SetupGrid:
    tasks = [(d, tech, profile, server, book) for _, _, d in grid.cells()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            flat = list(pool.map(_cell, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        flat = [_cell(t) for t in tasks]
    n_r = len(grid.throughputs_tps)
    rows = tuple(tuple(flat[i * n_r:(i + 1) * n_r]) for i in range(len(grid.capacities_gb)))
    return SetupGrid(grid, tech, profile, server, book, rows)


def profile_map(profiles: Sequence[ThroughputProfile]) -> Dict[str, ThroughputProfile]:
    out = {}
    for p in profiles:
        if p.technology in out:
            raise InvalidArgumentError(f"two profiles for {p.technology}")
        out[p.technology] = p
    return out
