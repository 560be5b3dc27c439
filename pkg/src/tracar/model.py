"""Domain types, the default price book, and setup cost/validity arithmetic.

Money is computed with exact rationals (``fractions.Fraction``) so that golden
values such as a $81,150 cluster total come out exact rather than drifting by a
few ulps.  Prices given as decimal literals (``5.50``, ``0.20``) are read through
their shortest ``repr`` so ``0.20`` means exactly one fifth of a dollar.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

Number = Union[int, float, Fraction]


class InvalidArgumentError(ValueError):
    """Raised when an operation receives arguments outside its contract."""


def exact(x: Number) -> Fraction:
    """Exact rational value of ``x``; floats go through their shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a quantity")
    if isinstance(x, int):
        return Fraction(x)
    if not math.isfinite(x):
        raise InvalidArgumentError(f"non-finite quantity {x!r}")
    return Fraction(repr(float(x)))


_price = functools.lru_cache(maxsize=4096)(exact)


@dataclass(frozen=True)
class StorageTechnology:
    name: str
    usd_per_gb: float
    read_latency_us: float
    write_latency_us: float
    queue_depth: int
    max_gb_per_node: float = 32768.0

    def __post_init__(self) -> None:
        if not self.name:
            raise InvalidArgumentError("technology name must be non-empty")
        if self.usd_per_gb <= 0:
            raise InvalidArgumentError(f"{self.name}: usd_per_gb must be > 0")
        if self.read_latency_us <= 0 or self.write_latency_us <= 0:
            raise InvalidArgumentError(f"{self.name}: latencies must be > 0")
        if self.queue_depth < 1:
            raise InvalidArgumentError(f"{self.name}: queue_depth must be >= 1")
        if self.max_gb_per_node <= 0:
            raise InvalidArgumentError(f"{self.name}: max_gb_per_node must be > 0")


# 3DXP latency is the ~10us figure for Optane; Flash latencies are configurable
# defaults for a datacenter NVMe NAND drive.  Queue depths are the thread counts
# that saturated each device.
XPOINT = StorageTechnology(
    name="3DXP",
    usd_per_gb=1.20,
    read_latency_us=10.0,
    write_latency_us=10.0,
    queue_depth=4,
)
FLASH = StorageTechnology(
    name="Flash",
    usd_per_gb=0.20,
    read_latency_us=80.0,
    write_latency_us=60.0,
    queue_depth=16,
)


@dataclass(frozen=True)
class CostBook:
    dram_usd_per_gb: float = 5.50
    processor_usd_per_node: float = 400.0
    misc_usd_per_node: float = 1000.0
    technologies: Tuple[StorageTechnology, ...] = (XPOINT, FLASH)

    def __post_init__(self) -> None:
        object.__setattr__(self, "technologies", tuple(self.technologies))
        if min(self.dram_usd_per_gb, self.processor_usd_per_node, self.misc_usd_per_node) <= 0:
            raise InvalidArgumentError("all prices must be > 0")
        names = [t.name for t in self.technologies]
        if len(set(names)) != len(names):
            raise InvalidArgumentError(f"duplicate technology names: {names}")

    def technology(self, name: str) -> StorageTechnology:
        for tech in self.technologies:
            if tech.name == name:
                return tech
        raise KeyError(name)

    @property
    def node_usd(self) -> Fraction:
        return _price(self.processor_usd_per_node) + _price(self.misc_usd_per_node)


@dataclass(frozen=True)
class ServerModel:
    max_dram_gb_per_node: float = 1024.0
    max_nodes: int = 1024

    def __post_init__(self) -> None:
        if self.max_dram_gb_per_node <= 0 or self.max_nodes <= 0:
            raise InvalidArgumentError("server limits must be > 0")


@dataclass(frozen=True)
class WorkloadMix:
    read_fraction: float = 0.5
    hot_key_fraction: float = 0.2
    hot_mass_fraction: float = 0.8
    n_transactions: int = 1_000_000
    dataset_gb: float = 100.0
    value_size_bytes: int = 100
    key_size_bytes: int = 16
    page_size_bytes: int = 4096

    def __post_init__(self) -> None:
        if not 0.0 <= self.read_fraction <= 1.0:
            raise InvalidArgumentError("read_fraction must lie in [0, 1]")
        if not 0.0 < self.hot_key_fraction <= self.hot_mass_fraction < 1.0:
            raise InvalidArgumentError(
                "need 0 < hot_key_fraction <= hot_mass_fraction < 1"
            )
        if self.n_transactions < 1:
            raise InvalidArgumentError("n_transactions must be >= 1")
        if self.dataset_gb <= 0 or self.value_size_bytes <= 0 or self.key_size_bytes <= 0:
            raise InvalidArgumentError("sizes must be > 0")
        p = self.page_size_bytes
        if p <= 0 or p & (p - 1):
            raise InvalidArgumentError("page_size_bytes must be a power of two")

    @property
    def write_fraction(self) -> float:
        return 1.0 - self.read_fraction


@dataclass(frozen=True)
class DemandPoint:
    capacity_gb: float
    throughput_tps: float

    def __post_init__(self) -> None:
        if not (self.capacity_gb > 0 and self.throughput_tps > 0):
            raise InvalidArgumentError(f"demand must be positive: {self}")

    @property
    def ratio_khz_per_tb(self) -> float:
        # (tps / 1000) / (GB / 1000) is numerically tps per GB
        return self.throughput_tps / self.capacity_gb


@dataclass(frozen=True)
class CostBreakdown:
    """Per-category cluster cost in exact USD."""

    dram_usd: Fraction
    storage_usd: Fraction
    processor_usd: Fraction
    misc_usd: Fraction

    @property
    def total_usd(self) -> Fraction:
        return self.dram_usd + self.storage_usd + self.processor_usd + self.misc_usd

    def cents(self) -> dict:
        """Components and total rounded half-even to whole cents."""
        out = {
            name: round(getattr(self, name) * 100)
            for name in ("dram_usd", "storage_usd", "processor_usd", "misc_usd")
        }
        out["total_usd"] = round(self.total_usd * 100)
        return out


@dataclass(frozen=True)
class SetupCandidate:
    technology: str
    n_nodes: int
    dram_gb_per_node: float
    storage_gb_per_node: float
    memory_fraction: float
    achieved_tps: float
    cost: CostBreakdown

    @property
    def total_usd(self) -> Fraction:
        return self.cost.total_usd


@dataclass(frozen=True)
class Verdict:
    valid: bool
    violations: Tuple[str, ...] = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.valid


def setup_cost(
    n_nodes: int,
    dram_gb_per_node: Number,
    storage_gb_per_node: Number,
    tech: StorageTechnology,
    book: CostBook,
) -> CostBreakdown:
    """Cost of ``n_nodes`` identical servers; device cost is linear in GB."""
    if isinstance(n_nodes, bool) or int(n_nodes) != n_nodes or n_nodes < 1:
        raise InvalidArgumentError(f"n_nodes must be a positive integer, got {n_nodes!r}")
    dram = exact(dram_gb_per_node)
    storage = exact(storage_gb_per_node)
    if dram < 0 or storage < 0:
        raise InvalidArgumentError("per-node quantities must be >= 0")
    if dram == 0 and storage == 0:
        raise InvalidArgumentError("a node needs DRAM or storage")
    n = int(n_nodes)
    return CostBreakdown(
        dram_usd=n * dram * _price(book.dram_usd_per_gb),
        storage_usd=n * storage * _price(tech.usd_per_gb),
        processor_usd=n * _price(book.processor_usd_per_node),
        misc_usd=n * _price(book.misc_usd_per_node),
    )


def validate_setup(
    candidate: SetupCandidate, server: ServerModel, tech: StorageTechnology
) -> Verdict:
    """Check every per-node and cluster limit; reports all violations."""
    problems = []
    if candidate.dram_gb_per_node > candidate.storage_gb_per_node:
        problems.append("dram exceeds per-node dataset")
    if candidate.dram_gb_per_node > server.max_dram_gb_per_node:
        problems.append("dram exceeds server limit")
    if candidate.storage_gb_per_node > tech.max_gb_per_node:
        problems.append("storage exceeds technology limit")
    if candidate.n_nodes > server.max_nodes:
        problems.append("node count exceeds server limit")
    return Verdict(valid=not problems, violations=tuple(problems))


def premium_of(a: StorageTechnology, b: StorageTechnology) -> StorageTechnology:
    """The costlier-per-GB technology; ``a`` on a price tie."""
    return b if b.usd_per_gb > a.usd_per_gb else a


def pick_pair(
    book: CostBook, names: Optional[Sequence[str]] = None
) -> Tuple[StorageTechnology, StorageTechnology]:
    """Resolve exactly two technologies, premium first."""
    techs = [book.technology(n) for n in names] if names else list(book.technologies)
    if len(techs) != 2:
        raise InvalidArgumentError(
            f"breakpoint runs need exactly 2 technologies, got {len(techs)}"
        )
    a, b = techs
    hi = premium_of(a, b)
    return (hi, b if hi is a else a)
