import math

import pytest

from oracles import through_origin_slope
from tracar.breakpoint import (
    ALL_TECH1,
    ALL_TECH2,
    NONE,
    PipelineInputs,
    classify_costs,
    compute_breakpoint,
    compute_tracar,
    sensitivity_sweep,
)
from tracar.model import InvalidArgumentError
from tracar.planner import DemandGrid, plan_grid

CAPS = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
THRS = [0.5 * k for k in range(1, 25)]
E_VALUES = (0.0, 0.05, 0.10, 0.20)


def _surfaces(f1, f2):
    return (
        [[f1(c, r) for r in THRS] for c in CAPS],
        [[f2(c, r) for r in THRS] for c in CAPS],
    )


def test_linear_planes_cross_on_unit_ratio():
    c1, c2 = _surfaces(lambda c, r: 2 * c + r, lambda c, r: c + 2 * r)
    line = classify_costs(CAPS, THRS, c1, c2)
    assert line.degenerate == NONE
    assert abs(line.ratio_khz_per_tb - 1.0) <= 1e-6
    for c, r in line.per_capacity_crossings:
        assert r == pytest.approx(c)


def test_crossings_between_grid_points_are_interpolated():
    # boundary at R = 1.5 C; the grid does not contain every crossing exactly
    c1, c2 = _surfaces(lambda c, r: 3 * c + r, lambda c, r: 1.5 * c + 2 * r)
    line = classify_costs(CAPS, THRS, c1, c2)
    assert line.ratio_khz_per_tb == pytest.approx(1.5, abs=1e-9)
    assert line.ratio_khz_per_tb == pytest.approx(through_origin_slope(line.per_capacity_crossings))


def test_premium_everywhere():
    c1, c2 = _surfaces(lambda c, r: c, lambda c, r: 2 * c)
    line = classify_costs(CAPS, THRS, c1, c2)
    assert line.degenerate == ALL_TECH1
    assert line.ratio_khz_per_tb == 0.0


def test_premium_nowhere():
    c1, c2 = _surfaces(lambda c, r: 3 * c, lambda c, r: c)
    line = classify_costs(CAPS, THRS, c1, c2)
    assert line.degenerate == ALL_TECH2
    assert math.isinf(line.ratio_khz_per_tb)
    assert set(line.censored) == {"above"}


def test_infeasible_cells_go_to_the_feasible_side():
    c1, c2 = _surfaces(lambda c, r: 2 * c + r, lambda c, r: None if r > 2 * c else c + 2 * r)
    line = classify_costs(CAPS, THRS, c1, c2)
    assert all(line.preference[i][j] == 1 for i, c in enumerate(CAPS) for j, r in enumerate(THRS) if r > 2 * c)


def test_no_feasible_cells():
    c1, c2 = _surfaces(lambda c, r: None, lambda c, r: None)
    with pytest.raises(InvalidArgumentError):
        classify_costs(CAPS, THRS, c1, c2)


def test_multiple_flips_warn():
    # premium wins a band, loses, then wins again
    c1, c2 = _surfaces(lambda c, r: 1 if 2 <= r < 4 or r >= 8 else 3, lambda c, r: 2)
    line = classify_costs(CAPS, THRS, c1, c2)
    assert line.warnings and "flips" in line.warnings[0]


def test_extra_cost_is_monotone_on_synthetic_planes():
    c1, c2 = _surfaces(lambda c, r: 2 * c + r, lambda c, r: c + 2 * r)
    lines = [classify_costs(CAPS, THRS, c1, c2, e) for e in E_VALUES]
    for a, b in zip(lines, lines[1:]):
        assert a.premium_cells() <= b.premium_cells()
        assert b.ratio_khz_per_tb <= a.ratio_khz_per_tb


def test_negative_extra_cost_rejected():
    c1, c2 = _surfaces(lambda c, r: 1, lambda c, r: 1)
    with pytest.raises(InvalidArgumentError):
        classify_costs(CAPS, THRS, c1, c2, -0.01)


@pytest.fixture
def f1_inputs(f1, xpoint, flash, server, book):
    grid = DemandGrid.linear(5_000, 60_000, 12, 10_000, 200_000, 20)
    return PipelineInputs(grid, xpoint, flash, f1, server, book)


def test_f1_breakpoint_is_mixed(f1_inputs):
    _, _, line = compute_tracar(f1_inputs)
    assert line.degenerate == NONE
    assert line.premium == "3DXP" and line.other == "Flash"
    assert 0 < line.ratio_khz_per_tb < 5


def test_classification_matches_cell_costs(f1_inputs):
    g1, g2, line = compute_tracar(f1_inputs)
    for i in range(12):
        for j in range(20):
            a, b = g1.cost(i, j), g2.cost(i, j)
            if a is not None and b is not None:
                assert (line.preference[i][j] == 1) == (a <= b)


def test_same_technology_twice_is_all_premium(f1, xpoint, server, book):
    grid = DemandGrid.linear(5_000, 60_000, 4, 10_000, 200_000, 4)
    g = plan_grid(grid, xpoint, f1["3DXP"], server, book)
    line = compute_breakpoint(g, g, premium="3DXP")
    assert line.degenerate == ALL_TECH1


def test_extra_cost_monotone_on_f1(f1_inputs):
    g1, g2, _ = compute_tracar(f1_inputs)
    lines = [compute_breakpoint(g1, g2, e) for e in E_VALUES]
    for a, b in zip(lines, lines[1:]):
        assert a.premium_cells() <= b.premium_cells()
        assert b.ratio_khz_per_tb <= a.ratio_khz_per_tb


def test_identity_sweep(f1_inputs):
    _, _, base = compute_tracar(f1_inputs)
    [(v, line)] = sensitivity_sweep("tech2_price", [0.20], f1_inputs)
    assert v == 0.20 and line == base


def test_cheaper_flash_raises_ratio(f1_inputs):
    ratios = [ln.ratio_khz_per_tb for _, ln in sensitivity_sweep("tech2_price", [0.2, 0.15, 0.1, 0.05], f1_inputs)]
    assert all(b >= a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] > ratios[0]


def test_cheaper_xpoint_lowers_ratio(f1_inputs):
    ratios = [ln.ratio_khz_per_tb for _, ln in sensitivity_sweep("tech1_price", [1.2, 1.0, 0.8, 0.6], f1_inputs)]
    assert all(b <= a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < ratios[0]


def test_sweep_rejects_unknown_parameter(f1_inputs):
    with pytest.raises(InvalidArgumentError):
        sensitivity_sweep("cpu_price", [1.0], f1_inputs)
    with pytest.raises(InvalidArgumentError):
        sensitivity_sweep("tech2_price", [0.1, 0.3, 0.2], f1_inputs)
