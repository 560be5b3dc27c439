"""Storage-technology breakpoint (TRaCaR ratio) and server provisioning optimizer."""
from .advisor import Observation, Recommendation, Trend, extrapolate, fit_trend, recommend, server_schedule
from .breakpoint import BreakpointLine, PipelineInputs, classify_costs, compute_breakpoint, compute_tracar, sensitivity_sweep
from .btree import BTreeModel, build_btree_layout
from .lru import KERNEL
from .model import (
    FLASH,
    XPOINT,
    CostBook,
    CostBreakdown,
    DemandPoint,
    InvalidArgumentError,
    ServerModel,
    SetupCandidate,
    StorageTechnology,
    WorkloadMix,
    setup_cost,
    validate_setup,
)
from .planner import DemandGrid, InfeasibleDemandError, SetupGrid, cheapest_setup, plan_grid
from .simulator import MissCurve, SimParams, ThroughputProfile, get_throughput_mem, simulate_miss_curve, throughput_from_misses
from .zipf import CalibrationError, ZipfSpec, calibrate_zipf

__version__ = "0.1.0"
