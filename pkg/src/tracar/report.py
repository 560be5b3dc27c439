"""CSV, JSON and text renderings of planner/advisor results, plus atomic writes.

Every renderer is a pure function of its inputs (no timestamps, sorted JSON
keys, shortest-repr floats) so identical runs produce identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

from .advisor import Recommendation, ScheduleRow
from .breakpoint import OTHER, PREMIUM, BreakpointLine
from .model import CostBreakdown, SetupCandidate
from .planner import SetupGrid


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_all(outputs: Dict[str, str], out_dir: Path) -> List[Path]:
    """Write every artifact; nothing is touched until all text is rendered."""
    written = []
    for name in sorted(outputs):
        p = Path(out_dir) / name
        write_atomic(p, outputs[name])
        written.append(p)
    return written


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return f"{_cents(v) / 100:.2f}"
    if isinstance(v, float):
        return repr(v)
    return v


def _cents(x: Fraction) -> int:
    return round(x * 100)


def usd(x: Fraction) -> str:
    c = _cents(x)
    sign = "-" if c < 0 else ""
    c = abs(c)
    return f"{sign}${c // 100:,}.{c % 100:02d}"


def json_number(x: Optional[float]):
    if x is None:
        return None
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def breakdown_doc(cost: CostBreakdown) -> dict:
    return {k: v / 100 for k, v in cost.cents().items()}


def candidate_doc(c: Optional[SetupCandidate]) -> Optional[dict]:
    if c is None:
        return None
    return {
        "technology": c.technology,
        "n_nodes": c.n_nodes,
        "dram_gb_per_node": c.dram_gb_per_node,
        "storage_gb_per_node": c.storage_gb_per_node,
        "memory_fraction": c.memory_fraction,
        "achieved_tps": c.achieved_tps,
        "cost_usd": breakdown_doc(c.cost),
    }


def dumps_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


SETUP_COLUMNS = [
    "capacity_gb", "throughput_tps", "technology", "feasible", "n_nodes",
    "memory_fraction", "dram_gb_per_node", "storage_gb_per_node", "achieved_tps",
    "dram_usd", "storage_usd", "processor_usd", "misc_usd", "total_usd",
]


def setup_grid_csv(grid: SetupGrid) -> str:
    rows = []
    for i, c in enumerate(grid.demand.capacities_gb):
        for j, r in enumerate(grid.demand.throughputs_tps):
            s = grid.cell(i, j)
            if s is None:
                rows.append([c, r, grid.technology.name, 0] + [None] * 10)
                continue
            k = s.cost
            rows.append([
                c, r, s.technology, 1, s.n_nodes, s.memory_fraction, s.dram_gb_per_node,
                s.storage_gb_per_node, s.achieved_tps, k.dram_usd, k.storage_usd,
                k.processor_usd, k.misc_usd, k.total_usd,
            ])
    return _csv(SETUP_COLUMNS, rows)


def classification_csv(g1: SetupGrid, g2: SetupGrid, line: BreakpointLine) -> str:
    by_name = {g1.technology.name: g1, g2.technology.name: g2}
    hi, lo = by_name[line.premium], by_name[line.other]
    rows = []
    for i, c in enumerate(hi.demand.capacities_gb):
        for j, r in enumerate(hi.demand.throughputs_tps):
            p = line.preference[i][j]
            cheaper = line.premium if p == PREMIUM else line.other if p == OTHER else None
            rows.append([
                c, r, r / c, hi.cost(i, j), lo.cost(i, j), cheaper, line.extra_cost_e,
            ])
    header = [
        "capacity_gb", "throughput_tps", "ratio_khz_per_tb",
        f"{line.premium}_total_usd", f"{line.other}_total_usd", "preferred", "extra_cost_e",
    ]
    return _csv(header, rows)


def crossings_csv(line: BreakpointLine) -> str:
    return _csv(
        ["capacity_gb", "crossing_tps", "censored"],
        [(c, r, s) for (c, r), s in zip(line.per_capacity_crossings, line.censored)],
    )


def breakpoint_doc(line: BreakpointLine) -> dict:
    return {
        "ratio_khz_per_tb": json_number(line.ratio_khz_per_tb),
        "premium": line.premium,
        "other": line.other,
        "extra_cost_e": line.extra_cost_e,
        "degenerate": line.degenerate,
        "fit_method": line.fit_method,
        "per_capacity_crossings": [
            {"capacity_gb": c, "crossing_tps": r, "censored": s or None}
            for (c, r), s in zip(line.per_capacity_crossings, line.censored)
        ],
        "warnings": list(line.warnings),
        "rule": f"{line.premium} preferred iff cost({line.premium}) <= (1 + E) * cost({line.other})",
    }


def recommendation_doc(rec: Recommendation, mode: str, horizon_years: float) -> dict:
    return {
        "chosen_technology": rec.chosen_technology,
        "alternative_technology": rec.alternative_technology,
        "premium_technology": rec.premium,
        "trend_ratio_khz_per_tb": json_number(rec.trend_ratio),
        "breakpoint_ratio_khz_per_tb": json_number(rec.breakpoint_ratio),
        "margin_through_origin": json_number(rec.margin),
        "margin_at_horizon_point": json_number(rec.point_margin),
        "degenerate": rec.degenerate,
        "tie_rule": "trend equal to breakpoint selects the non-premium technology",
        "horizon": {
            "years": horizon_years,
            "mode": mode,
            "capacity_gb": rec.horizon_demand.capacity_gb,
            "throughput_tps": rec.horizon_demand.throughput_tps,
        },
        "horizon_setup": candidate_doc(rec.horizon_setup),
        "alternative_setup": candidate_doc(rec.alternative_setup),
        "savings_fraction": rec.savings_fraction,
    }


def _fmt_ratio(x: Optional[float]) -> str:
    if x is None:
        return "n/a"
    if math.isinf(x):
        return "inf"
    return f"{x:.3f}"


def comparison_table(setups: Sequence[Optional[SetupCandidate]], names: Sequence[str]) -> str:
    heads = ["Item"]
    for name, s in zip(names, setups):
        heads.append(f"{name} ({s.n_nodes} servers)" if s else f"{name} (infeasible)")
    items = [
        ("DRAM", "dram_usd"), ("Secondary Storage", "storage_usd"),
        ("Processor", "processor_usd"), ("Miscellaneous", "misc_usd"), ("TOTAL", "total_usd"),
    ]
    rows = [heads]
    for label, attr in items:
        rows.append([label] + [usd(getattr(s.cost, attr)) if s else "-" for s in setups])
    widths = [max(len(r[k]) for r in rows) for k in range(len(heads))]
    lines = []
    for r in rows:
        cells = [r[0].ljust(widths[0])] + [v.rjust(w) for v, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def recommendation_text(rec: Recommendation, mode: str, horizon_years: float) -> str:
    d = rec.horizon_demand
    out = [
        f"Horizon demand ({mode}, {horizon_years:g} years): "
        f"{d.capacity_gb:,.0f} GB at {d.throughput_tps:,.0f} tps",
        f"Trend ratio: {_fmt_ratio(rec.trend_ratio)} KHz/TB   "
        f"Breakpoint: {_fmt_ratio(rec.breakpoint_ratio)} KHz/TB   "
        f"Margin: {_fmt_ratio(rec.margin)} (at horizon point: {_fmt_ratio(rec.point_margin)})",
        f"Premium technology: {rec.premium}; a tie selects the other technology.",
    ]
    if rec.degenerate != "none":
        out.append(f"Breakpoint is degenerate ({rec.degenerate}); margin undefined.")
    out.append(f"Recommendation: {rec.chosen_technology}")
    out.append("")
    setups = [rec.horizon_setup, rec.alternative_setup]
    names = [rec.chosen_technology, rec.alternative_technology]
    out.append(comparison_table(setups, names).rstrip("\n"))
    if rec.savings_fraction is not None:
        out.append("")
        out.append(
            f"{rec.chosen_technology} setup is {rec.savings_fraction:.2%} cheaper "
            f"(savings fraction {rec.savings_fraction:.6f})."
        )
    return "\n".join(out) + "\n"


def schedule_csv(rows: Sequence[ScheduleRow]) -> str:
    return _csv(
        ["year", "capacity_gb", "throughput_tps", "technology", "n_nodes", "new_nodes",
         "memory_fraction", "dram_gb_per_node", "storage_gb_per_node", "total_usd"],
        [
            (r.year, r.demand.capacity_gb, r.demand.throughput_tps, r.setup.technology,
             r.setup.n_nodes, r.new_nodes, r.setup.memory_fraction, r.setup.dram_gb_per_node,
             r.setup.storage_gb_per_node, r.setup.total_usd)
            for r in rows
        ],
    )


def sensitivity_csv(parameter: str, results) -> str:
    return _csv(
        ["parameter", "value", "ratio_khz_per_tb", "degenerate", "premium"],
        [(parameter, v, line.ratio_khz_per_tb, line.degenerate, line.premium) for v, line in results],
    )
