"""Fixture profile F1: hand-built throughput curves for 3DXP and Flash.

The curves are shaped so that, with the default price book, the cheapest setup
for 60,000 GB at 120,000 tps is

* 3DXP: 3 nodes at memory fraction 0.015 (40,000 tps/node), $81,150 total;
* Flash: 19 nodes at memory fraction 0.19 (6,400 tps/node), $101,300 total.

Every other (nodes, fraction) pair is strictly more expensive.  These are test
assets, not measurements.
"""
from __future__ import annotations

from typing import Dict

from .model import WorkloadMix
from .simulator import MEASURED, ThroughputProfile

F1_FRACTIONS = (0.005, 0.01, 0.015, 0.02, 0.05, 0.1, 0.19, 0.2, 0.5, 1.0)
F1_XPOINT_TPS = (20_000, 28_000, 40_000, 45_000, 55_000, 62_000, 68_000, 70_000, 80_000, 90_000)
F1_FLASH_TPS = (800, 1_000, 1_200, 1_500, 2_000, 2_900, 6_400, 6_600, 8_000, 9_000)


def f1_profiles(workload: WorkloadMix = WorkloadMix()) -> Dict[str, ThroughputProfile]:
    return {
        name: ThroughputProfile(
            technology=name,
            workload=workload,
            points=tuple(zip(F1_FRACTIONS, map(float, tps))),
            provenance=MEASURED,
        )
        for name, tps in (("3DXP", F1_XPOINT_TPS), ("Flash", F1_FLASH_TPS))
    }
