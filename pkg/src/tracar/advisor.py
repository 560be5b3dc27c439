"""Growth-trend fitting, technology recommendation, and yearly provisioning."""
from __future__ import annotations

import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .breakpoint import ALL_TECH1, ALL_TECH2, BreakpointLine
from .model import DemandPoint, InvalidArgumentError, SetupCandidate
from .planner import InfeasibleDemandError, SetupGrid, cheapest_setup

THROUGH_ORIGIN = "through_origin"
AFFINE = "affine"


class TrendUndefinedError(ValueError):
    pass


@dataclass(frozen=True)
class Observation:
    t_years: float
    capacity_gb: float
    throughput_tps: float

    def __post_init__(self) -> None:
        if not (self.capacity_gb > 0 and self.throughput_tps > 0):
            raise InvalidArgumentError(f"observation must be positive: {self}")


@dataclass(frozen=True)
class Trend:
    ratio_khz_per_tb: float
    base: Observation
    capacity_growth_gb_per_year: float
    throughput_growth_tps_per_year: float


def fit_trend(observations: Sequence[Observation]) -> Trend:
    """Least-squares lines for capacity(t) and throughput(t); ratio of slopes.

    ``base`` is the fitted point at the earliest observation time, which is the
    earliest observation itself whenever the data are collinear.
    """
    obs = sorted(observations, key=lambda o: o.t_years)
    if len(obs) < 2:
        raise TrendUndefinedError("need at least two observations")
    ts = [o.t_years for o in obs]
    if len(set(ts)) < 2:
        raise TrendUndefinedError("observations need distinct times")
    if len({o.capacity_gb for o in obs}) < 2:
        raise TrendUndefinedError("capacity does not change; ratio undefined")
    cap = statistics.linear_regression(ts, [o.capacity_gb for o in obs])
    thr = statistics.linear_regression(ts, [o.throughput_tps for o in obs])
    if cap.slope == 0:
        raise TrendUndefinedError("zero capacity growth; ratio undefined")
    t0 = ts[0]
    if len(obs) == 2:
        base = obs[0]
    else:
        base = Observation(t0, cap.intercept + cap.slope * t0, thr.intercept + thr.slope * t0)
    return Trend(
        ratio_khz_per_tb=thr.slope / cap.slope,
        base=base,
        capacity_growth_gb_per_year=cap.slope,
        throughput_growth_tps_per_year=thr.slope,
    )


def extrapolate(trend: Trend, horizon_years: float, mode: str = THROUGH_ORIGIN) -> DemandPoint:
    if horizon_years < 0:
        raise InvalidArgumentError("horizon_years must be >= 0")
    capacity = trend.base.capacity_gb + trend.capacity_growth_gb_per_year * horizon_years
    if mode == AFFINE:
        throughput = trend.base.throughput_tps + trend.throughput_growth_tps_per_year * horizon_years
    elif mode == THROUGH_ORIGIN:
        throughput = trend.ratio_khz_per_tb * capacity
    else:
        raise InvalidArgumentError(f"unknown extrapolation mode {mode!r}")
    return DemandPoint(capacity, throughput)


@dataclass(frozen=True)
class Recommendation:
    chosen_technology: str
    alternative_technology: str
    trend_ratio: float
    breakpoint_ratio: float
    margin: Optional[float]
    point_margin: Optional[float]
    horizon_demand: DemandPoint
    horizon_setup: Optional[SetupCandidate]
    alternative_setup: Optional[SetupCandidate]
    savings_fraction: Optional[float]
    premium: str
    degenerate: str


def choose(trend_ratio: float, breakpoint: BreakpointLine) -> str:
    """Premium technology iff the trend is strictly steeper than the breakpoint."""
    if breakpoint.degenerate == ALL_TECH1:
        return breakpoint.premium
    if breakpoint.degenerate == ALL_TECH2:
        return breakpoint.other
    return breakpoint.premium if trend_ratio > breakpoint.ratio_khz_per_tb else breakpoint.other


def _try_setup(grid: SetupGrid, demand: DemandPoint) -> Optional[SetupCandidate]:
    try:
        return cheapest_setup(demand, grid.technology, grid.profile, grid.server, grid.book)
    except InfeasibleDemandError:
        return None


def recommend(
    trend: Trend,
    breakpoint: BreakpointLine,
    horizon_demand: DemandPoint,
    grid1: SetupGrid,
    grid2: SetupGrid,
) -> Recommendation:
    chosen = choose(trend.ratio_khz_per_tb, breakpoint)
    by_name = {grid1.technology.name: grid1, grid2.technology.name: grid2}
    if set(by_name) != {breakpoint.premium, breakpoint.other}:
        raise InvalidArgumentError("grids do not match the breakpoint's technologies")
    alternative = breakpoint.other if chosen == breakpoint.premium else breakpoint.premium
    mine = _try_setup(by_name[chosen], horizon_demand)
    theirs = _try_setup(by_name[alternative], horizon_demand)
    if mine is None and theirs is None:
        raise InfeasibleDemandError(horizon_demand, f"{chosen} and {alternative}", "both technologies")

    savings = None
    if mine is not None and theirs is not None:
        savings = float(1 - Fraction(mine.total_usd) / theirs.total_usd)
    degenerate = breakpoint.degenerate != "none"
    bp = breakpoint.ratio_khz_per_tb
    return Recommendation(
        chosen_technology=chosen,
        alternative_technology=alternative,
        trend_ratio=trend.ratio_khz_per_tb,
        breakpoint_ratio=bp,
        margin=None if degenerate else trend.ratio_khz_per_tb - bp,
        point_margin=None if degenerate else horizon_demand.ratio_khz_per_tb - bp,
        horizon_demand=horizon_demand,
        horizon_setup=mine,
        alternative_setup=theirs,
        savings_fraction=savings,
        premium=breakpoint.premium,
        degenerate=breakpoint.degenerate,
    )


@dataclass(frozen=True)
class ScheduleRow:
    year: int
    demand: DemandPoint
    setup: SetupCandidate
    new_nodes: int


class ScheduleInfeasibleError(InfeasibleDemandError):
    def __init__(self, year: int, cause: InfeasibleDemandError):
        super().__init__(cause.demand, cause.technology, cause.binding)
        self.year = year
        self.args = (f"year {year}: {cause}",)


def server_schedule(trend: Trend, horizon_years: int, tech, profile, server, book) -> List[ScheduleRow]:
    """Yearly affine demand, cheapest setup, and nodes to add (never removed)."""
    if horizon_years < 1 or int(horizon_years) != horizon_years:
        raise InvalidArgumentError("horizon_years must be an integer >= 1")
    rows: List[ScheduleRow] = []
    prev = 0
    for year in range(int(horizon_years) + 1):
        demand = extrapolate(trend, year, AFFINE)
        try:
            setup = cheapest_setup(demand, tech, profile, server, book)
        except InfeasibleDemandError as exc:
            raise ScheduleInfeasibleError(year, exc) from exc
        rows.append(ScheduleRow(year, demand, setup, max(0, setup.n_nodes - prev)))
        prev = max(prev, setup.n_nodes)
    return rows


def trend_from_tuples(rows: Sequence[Tuple[float, float, float]]) -> Trend:
    return fit_trend([Observation(*map(float, r)) for r in rows])
