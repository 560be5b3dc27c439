"""Software stand-in for measuring throughput as DRAM shrinks.

A seeded zipfian b-tree workload is replayed through an LRU page cache sized as
a fraction of the tree, and the resulting faults per transaction feed a
queue-depth latency model.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .btree import BTreeModel, build_btree_layout
from .lru import lru_run
from .model import InvalidArgumentError, StorageTechnology, WorkloadMix
from .zipf import ZipfSpec, calibrate_zipf

logger = logging.getLogger(__name__)

DEFAULT_SWEEP = (0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0)
SIMULATED = "simulated"
MEASURED = "measured-fixture"


@dataclass(frozen=True)
class MissCurve:
    points: Tuple[Tuple[float, float], ...]  # (memory_fraction, faults_per_txn)
    seed: int
    n_transactions: int
    writebacks: Tuple[int, ...] = ()


@dataclass(frozen=True)
class ThroughputProfile:
    technology: str
    workload: WorkloadMix
    points: Tuple[Tuple[float, float], ...]  # (memory_fraction, tps_per_node), ascending
    provenance: str = SIMULATED
    seed: int = 0
    faults: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        pts = tuple(sorted((float(f), float(t)) for f, t in self.points))
        object.__setattr__(self, "points", pts)
        if not pts:
            raise InvalidArgumentError("profile has no points")
        for f, tps in pts:
            if not 0.0 < f <= 1.0:
                raise InvalidArgumentError(f"memory fraction {f} outside (0, 1]")
            if tps <= 0:
                raise InvalidArgumentError(f"tps_per_node must be > 0 (got {tps} at f={f})")
        if len({f for f, _ in pts}) != len(pts):
            raise InvalidArgumentError("duplicate memory fractions in profile")

    @property
    def fractions(self) -> Tuple[float, ...]:
        return tuple(f for f, _ in self.points)

    def tps_at(self, fraction: float) -> float:
        for f, tps in self.points:
            if f == fraction:
                return tps
        raise KeyError(fraction)

    @property
    def max_tps(self) -> float:
        return max(t for _, t in self.points)


@dataclass(frozen=True)
class SimParams:
    n_keys: int = 1_000_000
    t_cpu_us: float = 10.0
    seed: int = 0
    sweep: Tuple[float, ...] = DEFAULT_SWEEP
    node_pages: int = 1
    jobs: int = 1
    kernel: Optional[str] = None


@dataclass(frozen=True)
class Trace:
    pages: np.ndarray  # flattened root-to-leaf paths, int32
    dirty: np.ndarray  # per-access write flag, uint8
    n_transactions: int
    path_len: int


def generate_trace(
    tree: BTreeModel, workload: WorkloadMix, zipf: ZipfSpec, seed: int
) -> Trace:
    """Seeded transaction trace.

    Popularity rank is decoupled from key order by a seeded permutation, so hot
    keys are scattered across leaves instead of packed into a few pages.
    """
    if zipf.n_items != tree.n_keys:
        raise InvalidArgumentError("zipf spec must cover exactly the tree's keys")
    perm_ss, rank_ss, write_ss = np.random.SeedSequence(seed).spawn(3)
    perm = np.random.default_rng(perm_ss).permutation(tree.n_keys)
    n = workload.n_transactions
    ranks = zipf.sample(n, np.random.default_rng(rank_ss))
    keys = perm[ranks]
    writes = np.random.default_rng(write_ss).random(n) < workload.write_fraction
    paths = tree.paths(keys)
    dirty = np.repeat(writes.astype(np.uint8), tree.height)
    return Trace(
        pages=np.ascontiguousarray(paths.reshape(-1), dtype=np.intc),
        dirty=np.ascontiguousarray(dirty),
        n_transactions=n,
        path_len=tree.height,
    )


def warmup_transactions(n_transactions: int, n_pages: int) -> int:
    return min(n_transactions // 10, n_pages)


def cache_pages(fraction: float, n_pages: int) -> int:
    return max(1, int(fraction * n_pages))


def _replay(args) -> Tuple[float, int]:
    pages, dirty, n_pages, capacity, start, measured, kernel = args
    _, _, misses_after, cold_after, writebacks = lru_run(
        pages, dirty, n_pages, capacity, start, kernel=kernel
    )
    # compulsory first-touch misses are excluded: they do not depend on DRAM size
    return (misses_after - cold_after) / measured, writebacks


def simulate_miss_curve(
    tree: BTreeModel,
    workload: WorkloadMix,
    zipf: ZipfSpec,
    memory_fractions: Sequence[float],
    seed: Optional[int] = None,
    jobs: int = 1,
    kernel: Optional[str] = None,
) -> MissCurve:
    fractions = [float(f) for f in memory_fractions]
    if not fractions:
        raise InvalidArgumentError("memory_fractions is empty")
    if any(not 0.0 < f <= 1.0 for f in fractions):
        raise InvalidArgumentError("memory fractions must lie in (0, 1]")
    if fractions != sorted(fractions):
        raise InvalidArgumentError("memory fractions must be sorted ascending")
    seed = zipf.seed if seed is None else seed

    trace = generate_trace(tree, workload, zipf, seed)
    warm = warmup_transactions(trace.n_transactions, tree.n_pages)
    measured = trace.n_transactions - warm
    start = warm * trace.path_len
    tasks = [
        (trace.pages, trace.dirty, tree.n_pages, cache_pages(f, tree.n_pages), start, measured, kernel)
        for f in fractions
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_replay, tasks))
    else:
        results = [_replay(t) for t in tasks]
    logger.debug("miss curve seed=%d: %s", seed, results)
    return MissCurve(
        points=tuple((f, r[0]) for f, r in zip(fractions, results)),
        seed=seed,
        n_transactions=trace.n_transactions,
        writebacks=tuple(r[1] for r in results),
    )


def throughput_from_misses(
    faults_per_txn: float,
    write_fraction: float,
    tech: StorageTechnology,
    t_cpu_us: float = 10.0,
) -> float:
    """Per-node tps when ``queue_depth`` transactions overlap their faults."""
    if faults_per_txn < 0:
        raise InvalidArgumentError("faults_per_txn must be >= 0")
    if t_cpu_us <= 0:
        raise InvalidArgumentError("t_cpu_us must be > 0")
    if not 0.0 <= write_fraction <= 1.0:
        raise InvalidArgumentError("write_fraction must lie in [0, 1]")
    t_dev = tech.read_latency_us * (1.0 - write_fraction) + tech.write_latency_us * write_fraction
    latency = t_cpu_us + faults_per_txn * t_dev
    return tech.queue_depth * 1e6 / latency


def get_throughput_mem(
    workload: WorkloadMix,
    tech: StorageTechnology,
    params: SimParams = SimParams(),
    curve: Optional[MissCurve] = None,
) -> ThroughputProfile:
    """Throughput-vs-memory-fraction profile for one technology.

    ``curve`` lets callers reuse a miss curve across technologies; the LRU
    replay does not depend on the device.
    """
    if not params.sweep:
        raise InvalidArgumentError("sweep is empty")
    if curve is None:
        curve = miss_curve_for(workload, params)
    points = [
        (f, throughput_from_misses(faults, workload.write_fraction, tech, params.t_cpu_us))
        for f, faults in curve.points
    ]
    return ThroughputProfile(
        technology=tech.name,
        workload=workload,
        points=tuple(points),
        provenance=SIMULATED,
        seed=params.seed,
        faults=tuple(faults for _, faults in curve.points),
    )


def miss_curve_for(workload: WorkloadMix, params: SimParams) -> MissCurve:
    s = calibrate_zipf(params.n_keys, workload.hot_key_fraction, workload.hot_mass_fraction)
    tree = build_btree_layout(
        params.n_keys,
        workload.key_size_bytes,
        workload.value_size_bytes,
        workload.page_size_bytes,
        params.node_pages,
    )
    zipf = ZipfSpec(params.n_keys, s, params.seed)
    return simulate_miss_curve(
        tree, workload, zipf, sorted(params.sweep), params.seed, params.jobs, params.kernel
    )


def profiles_for(
    workload: WorkloadMix, techs: Sequence[StorageTechnology], params: SimParams
) -> List[ThroughputProfile]:
    curve = miss_curve_for(workload, params)
    return [get_throughput_mem(workload, t, params, curve) for t in techs]
