"""Independent reference computations used only by the tests.

None of these call into the search, kernel, or layout code they check.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from tracar.model import SetupCandidate, setup_cost, validate_setup


def brute_force_setup(demand, tech, profile, server, book) -> Optional[SetupCandidate]:
    """Enumerate every (nodes, fraction) pair; min by (exact cost, nodes, fraction)."""
    node_usd = book.processor_usd_per_node + book.misc_usd_per_node
    feasible: List[Tuple[float, int, float, float, float, float]] = []
    for n in range(1, server.max_nodes + 1):
        storage = demand.capacity_gb / n
        need = demand.throughput_tps / n
        for f, tps in profile.points:
            dram = f * storage
            if tps < need:
                continue
            cand = SetupCandidate(tech.name, n, dram, storage, f, n * tps, None)
            if not validate_setup(cand, server, tech).valid:
                continue
            approx = n * (node_usd + dram * book.dram_usd_per_gb + storage * tech.usd_per_gb)
            feasible.append((approx, n, f, dram, storage, tps))
    if not feasible:
        return None
    floor = min(x[0] for x in feasible)
    # exact costs only where float rounding could matter
    best = None
    for approx, n, f, dram, storage, tps in feasible:
        if approx > floor * (1 + 1e-9) + 1e-6:
            continue
        share = Fraction(repr(float(demand.capacity_gb))) / n
        cost = setup_cost(n, Fraction(repr(float(f))) * share, share, tech, book)
        key = (cost.total_usd, n, f)
        if best is None or key < best[0]:
            best = (key, SetupCandidate(tech.name, n, dram, storage, f, n * tps, cost))
    return best[1]


def stack_distance_misses(pages: Sequence[int], capacities: Sequence[int]) -> Dict[int, int]:
    """Mattson stack algorithm: misses for every capacity in one pass."""
    stack: List[int] = []
    depth_hist: Dict[int, int] = {}
    cold = 0
    for p in pages:
        try:
            d = stack.index(p)
        except ValueError:
            cold += 1
            stack.insert(0, p)
            continue
        depth_hist[d] = depth_hist.get(d, 0) + 1
        stack.pop(d)
        stack.insert(0, p)
    return {
        c: cold + sum(v for d, v in depth_hist.items() if d >= c)
        for c in capacities
    }


def level_count(n_keys: int, leaf_capacity: int, fanout: int) -> Tuple[int, int]:
    """(height, n_pages) by labelling every key with its ancestor at each level."""
    ids = np.unique(np.arange(n_keys, dtype=np.int64) // leaf_capacity)
    height, pages = 1, ids.size
    while ids.size > 1:
        ids = np.unique(ids // fanout)
        height += 1
        pages += ids.size
    return height, pages


def zipf_top_mass(n: int, s: float, k: int) -> float:
    """Direct summation of rank weights in pure Python."""
    weights = [i ** (-s) for i in range(1, n + 1)]
    return math.fsum(weights[:k]) / math.fsum(weights)


def through_origin_slope(points: Sequence[Tuple[float, float]]) -> float:
    return sum(x * y for x, y in points) / sum(x * x for x, _ in points)


def random_instance(rng):
    """Small randomized planner instance: (grid, tech, profile, server, book).

    Values sit on coarse lattices so exact cost ties actually occur.
    """
    from tracar.model import CostBook, ServerModel, StorageTechnology, WorkloadMix
    from tracar.planner import DemandGrid
    from tracar.simulator import ThroughputProfile

    tech = StorageTechnology(
        "dev", float(rng.choice([0.1, 0.2, 0.5, 1.2])), 10.0, 10.0, 4,
        max_gb_per_node=float(rng.choice([500, 2000, 32768])),
    )
    book = CostBook(
        dram_usd_per_gb=float(rng.choice([2.0, 5.5, 8.0])),
        processor_usd_per_node=float(rng.choice([100, 400])),
        misc_usd_per_node=float(rng.choice([0.5, 1000])),
        technologies=(tech,),
    )
    server = ServerModel(
        max_dram_gb_per_node=float(rng.choice([64, 256, 1024])),
        max_nodes=int(rng.integers(1, 65)),
    )
    k = int(rng.integers(1, 17))
    fractions = sorted(rng.choice(np.arange(1, 65) / 64, size=k, replace=False).tolist())
    # throughput rises with memory, with occasional plateaus
    tps = np.sort(rng.choice([500, 1000, 2000, 4000, 8000, 16000], size=k))
    profile = ThroughputProfile("dev", WorkloadMix(), tuple(zip(fractions, tps.tolist())), "measured-fixture")
    n_c, n_r = int(rng.integers(1, 11)), int(rng.integers(1, 11))
    caps = np.unique(rng.integers(1, 200, size=n_c) * 100)
    thrs = np.unique(rng.integers(1, 200, size=n_r) * 1000)
    grid = DemandGrid(tuple(caps.tolist()), tuple(thrs.tolist()))
    return grid, tech, profile, server, book


def plan_matches_brute_force(setup_grid, grid, tech, profile, server, book) -> int:
    """Number of cells checked; raises AssertionError on the first mismatch."""
    checked = 0
    for i, j, demand in grid.cells():
        want = brute_force_setup(demand, tech, profile, server, book)
        got = setup_grid.cell(i, j)
        if want is None:
            assert got is None, (demand, got)
        else:
            assert got is not None, (demand, want)
            assert (got.total_usd, got.n_nodes, got.memory_fraction) == (
                want.total_usd, want.n_nodes, want.memory_fraction
            ), (demand, got, want)
        checked += 1
    return checked
