"""Which technology is cheaper where, and the through-origin line separating them."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .model import (
    CostBook,
    InvalidArgumentError,
    ServerModel,
    StorageTechnology,
    exact,
    premium_of,
)
from .planner import DemandGrid, SetupGrid, plan_grid
from .simulator import ThroughputProfile

NONE, ALL_TECH1, ALL_TECH2 = "none", "all_tech1", "all_tech2"
FIT_METHOD = "least-squares line through the origin over per-capacity crossings"

# cell preference codes
PREMIUM, OTHER, NEITHER = 1, 2, 0


@dataclass(frozen=True)
class BreakpointLine:
    """Boundary between the premium technology (tech1) and the other one.

    ``ratio_khz_per_tb`` is 0 when the premium technology wins every feasible
    cell and infinite when it wins none, so "trend > ratio picks premium" holds
    in the degenerate cases too.  ``censored[i]`` is ``"below"``/``"above"`` when
    column ``i`` never flips inside the grid and its crossing is clamped to the
    lowest/highest throughput.
    """

    ratio_khz_per_tb: float
    per_capacity_crossings: Tuple[Tuple[float, float], ...]
    extra_cost_e: float
    degenerate: str
    premium: str
    other: str
    censored: Tuple[str, ...] = ()
    warnings: Tuple[str, ...] = ()
    preference: Tuple[Tuple[int, ...], ...] = field(default=(), repr=False)
    fit_method: str = FIT_METHOD

    def premium_cells(self) -> frozenset:
        return frozenset(
            (i, j)
            for i, row in enumerate(self.preference)
            for j, p in enumerate(row)
            if p == PREMIUM
        )


def _prefers_premium(c1, c2, scale: Fraction) -> int:
    if c1 is None and c2 is None:
        return NEITHER
    if c1 is None:
        return OTHER
    if c2 is None:
        return PREMIUM
    return PREMIUM if exact(c1) <= scale * exact(c2) else OTHER


def classify_costs(
    capacities: Sequence[float],
    throughputs: Sequence[float],
    cost1: Sequence[Sequence],
    cost2: Sequence[Sequence],
    extra_cost_e: float = 0.0,
    premium: str = "tech1",
    other: str = "tech2",
) -> BreakpointLine:
    """Breakpoint from two cost surfaces indexed ``[capacity][throughput]``.

    ``None`` marks an infeasible cell.  A cell goes to the premium technology iff
    ``cost1 <= (1 + E) * cost2``.
    """
    if extra_cost_e < 0:
        raise InvalidArgumentError("extra_cost_e must be >= 0")
    n_c, n_r = len(capacities), len(throughputs)
    for surface in (cost1, cost2):
        if len(surface) != n_c or any(len(row) != n_r for row in surface):
            raise InvalidArgumentError("cost surfaces do not match the grid shape")
    scale = 1 + exact(extra_cost_e)

    pref = tuple(
        tuple(_prefers_premium(cost1[i][j], cost2[i][j], scale) for j in range(n_r))
        for i in range(n_c)
    )
    flat = [p for row in pref for p in row]
    if not any(p != NEITHER for p in flat):
        raise InvalidArgumentError("no feasible cell in either grid")

    crossings: List[Tuple[float, float]] = []
    censored: List[str] = []
    warnings: List[str] = []
    for i, row in enumerate(pref):
        entries = [j for j, p in enumerate(row) if p == PREMIUM and (j == 0 or row[j - 1] != PREMIUM)]
        if len(entries) > 1:
            warnings.append(
                f"capacity {capacities[i]:g} GB: preference flips {len(entries)} times; "
                "using the lowest crossing"
            )
        if not entries:
            crossings.append((float(capacities[i]), float(throughputs[-1])))
            censored.append("above")
            continue
        j = entries[0]
        if j == 0:
            crossings.append((float(capacities[i]), float(throughputs[0])))
            censored.append("below")
            continue
        crossings.append((float(capacities[i]), _interpolate(
            throughputs[j - 1], throughputs[j],
            cost1[i][j - 1], cost2[i][j - 1], cost1[i][j], cost2[i][j], scale,
        )))
        censored.append("")

    if OTHER not in flat:
        degenerate, ratio = ALL_TECH1, 0.0
    elif PREMIUM not in flat:
        degenerate, ratio = ALL_TECH2, math.inf
    else:
        degenerate = NONE
        num = math.fsum(c * r for c, r in crossings)
        den = math.fsum(c * c for c, _ in crossings)
        ratio = num / den
        if all(censored):
            warnings.append("boundary lies outside the grid's throughput range in every column")
    return BreakpointLine(
        ratio_khz_per_tb=ratio,
        per_capacity_crossings=tuple(crossings),
        extra_cost_e=float(extra_cost_e),
        degenerate=degenerate,
        premium=premium,
        other=other,
        censored=tuple(censored),
        warnings=tuple(warnings),
        preference=pref,
    )


def _interpolate(r_lo, r_hi, c1_lo, c2_lo, c1_hi, c2_hi, scale: Fraction) -> float:
    """Zero of the linearly interpolated margin ``(1+E)*cost2 - cost1``."""
    if None in (c1_lo, c2_lo, c1_hi, c2_hi):
        return float(r_hi)
    d_lo = scale * exact(c2_lo) - exact(c1_lo)
    d_hi = scale * exact(c2_hi) - exact(c1_hi)
    # d_lo < 0 <= d_hi by construction
    t = -d_lo / (d_hi - d_lo)
    return float(exact(r_lo) + (exact(r_hi) - exact(r_lo)) * t)


def compute_breakpoint(
    grid1: SetupGrid,
    grid2: SetupGrid,
    extra_cost_e: float = 0.0,
    premium: Optional[str] = None,
) -> BreakpointLine:
    """Classify every cell and fit the breakpoint ratio.

    The premium technology defaults to the one with the higher price per GB.
    """
    if grid1.demand != grid2.demand:
        raise InvalidArgumentError("setup grids cover different demand grids")
    if premium is None:
        premium = premium_of(grid1.technology, grid2.technology).name
    if premium == grid1.technology.name:
        hi, lo = grid1, grid2
    elif premium == grid2.technology.name:
        hi, lo = grid2, grid1
    else:
        raise InvalidArgumentError(f"premium {premium!r} is not one of the grids")
    n_c, n_r = grid1.demand.shape
    return classify_costs(
        grid1.demand.capacities_gb,
        grid1.demand.throughputs_tps,
        [[hi.cost(i, j) for j in range(n_r)] for i in range(n_c)],
        [[lo.cost(i, j) for j in range(n_r)] for i in range(n_c)],
        extra_cost_e,
        premium=hi.technology.name,
        other=lo.technology.name,
    )


@dataclass(frozen=True)
class PipelineInputs:
    demand: DemandGrid
    tech1: StorageTechnology  # premium
    tech2: StorageTechnology
    profiles: Dict[str, ThroughputProfile]
    server: ServerModel = ServerModel()
    book: CostBook = CostBook()
    extra_cost_e: float = 0.0
    jobs: int = 1


def compute_tracar(inputs: PipelineInputs) -> Tuple[SetupGrid, SetupGrid, BreakpointLine]:
    """Plan both technologies over the grid and extract the breakpoint."""
    g1 = plan_grid(inputs.demand, inputs.tech1, inputs.profiles[inputs.tech1.name],
                   inputs.server, inputs.book, inputs.jobs)
    g2 = plan_grid(inputs.demand, inputs.tech2, inputs.profiles[inputs.tech2.name],
                   inputs.server, inputs.book, inputs.jobs)
    return g1, g2, compute_breakpoint(g1, g2, inputs.extra_cost_e, premium=inputs.tech1.name)


SWEEP_PARAMETERS = ("tech1_price", "tech2_price", "dram_price")


def with_price(inputs: PipelineInputs, parameter: str, value: float) -> PipelineInputs:
    if value <= 0:
        raise InvalidArgumentError("swept prices must be > 0")
    if parameter == "dram_price":
        return dataclasses.replace(inputs, book=dataclasses.replace(inputs.book, dram_usd_per_gb=value))
    if parameter in ("tech1_price", "tech2_price"):
        attr = "tech1" if parameter == "tech1_price" else "tech2"
        old = getattr(inputs, attr)
        new = dataclasses.replace(old, usd_per_gb=value)
        techs = tuple(new if t.name == old.name else t for t in inputs.book.technologies)
        book = dataclasses.replace(inputs.book, technologies=techs)
        return dataclasses.replace(inputs, book=book, **{attr: new})
    raise InvalidArgumentError(f"unknown sweep parameter {parameter!r}; use one of {SWEEP_PARAMETERS}")


def sensitivity_sweep(
    parameter: str, values: Sequence[float], inputs: PipelineInputs
) -> List[Tuple[float, BreakpointLine]]:
    """Re-run planning and classification with one price changed per value.

    Profiles and the premium/other roles stay fixed, so a swept premium price
    dropping below the other technology's does not silently swap the roles.
    """
    vals = [float(v) for v in values]
    if any(v <= 0 for v in vals):
        raise InvalidArgumentError("swept values must be positive")
    if vals != sorted(vals) and vals != sorted(vals, reverse=True):
        raise InvalidArgumentError("swept values must be sorted")
    out = []
    for v in vals:
        _, _, line = compute_tracar(with_price(inputs, parameter, v))
        out.append((v, line))
    return out
