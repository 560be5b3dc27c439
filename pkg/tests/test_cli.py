import csv
import json
from fractions import Fraction

import pytest

from tracar.cli import run
from tracar.config import ConfigError, load_config, parse_override

FAST = [
    "--set", "simulation.n_keys=20000",
    "--set", "workload.n_transactions=40000",
]
F1 = ["--set", "profiles.source=fixture-f1"]


def _run(tmp_path, *argv):
    return run([*argv, "-o", str(tmp_path / "out")])


def _files(tmp_path):
    out = tmp_path / "out"
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())} if out.exists() else {}


def test_defaults_resolve():
    cfg = load_config()
    assert (cfg.tech1.name, cfg.tech2.name) == ("3DXP", "Flash")
    assert cfg.grid.shape == (12, 20)
    assert cfg.book.dram_usd_per_gb == 5.5


def test_override_precedence(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"simulation": {"seed": 4}, "extra_cost_e": 0.1}))
    cfg = load_config(path, ["simulation.seed=7"])
    assert cfg.sim.seed == 7 and cfg.extra_cost_e == 0.1


def test_output_dir_precedence(tmp_path, monkeypatch):
    monkeypatch.setenv("TRACAR_OUTPUT_DIR", str(tmp_path / "env"))
    assert load_config().output_dir == tmp_path / "env"
    assert load_config(output_flag="x").output_dir.name == "x"


def test_parse_override_values():
    assert parse_override("a.b=3") == (["a", "b"], 3)
    assert parse_override("compare=[\"Flash\",\"3DXP\"]") == (["compare"], ["Flash", "3DXP"])
    assert parse_override("profiles.source=files") == (["profiles", "source"], "files")
    with pytest.raises(ConfigError):
        parse_override("novalue")


@pytest.mark.parametrize("doc", [
    {"nonsense": 1},
    {"server": {"max_nodes": 0}},
    {"compare": ["3DXP"]},
    {"grid": {"capacity_gb": [10, 5, 3]}},
    {"profiles": {"source": "psychic"}},
    {"technologies": {"Flash": {"usd_per_gb": -1}}},
])
def test_bad_configs_are_config_errors(tmp_path, doc):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ConfigError):
        load_config(path)


def test_malformed_config_exits_2_and_writes_nothing(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{ not json")
    assert _run(tmp_path, "breakpoint", "-c", str(path)) == 2
    assert _files(tmp_path) == {}
    assert "error=config" in capsys.readouterr().err


def test_missing_config_file_exits_2(tmp_path):
    assert _run(tmp_path, "plan", "-c", str(tmp_path / "nope.json")) == 2


def test_infeasible_demand_exits_3(tmp_path, capsys):
    code = _run(tmp_path, "recommend", *F1, "--set", "server.max_nodes=2",
                "--set", "trend.breakpoint_ratio=1.24")
    assert code == 3
    assert "error=infeasible" in capsys.readouterr().err
    assert _files(tmp_path) == {}


def test_unwritable_output_exits_4(tmp_path):
    blocker = tmp_path / "out"
    blocker.write_text("a file, not a directory")
    assert run(["plan", *F1, "-o", str(blocker / "sub")]) == 4


def test_profile_command_writes_loadable_profiles(tmp_path):
    assert _run(tmp_path, "profile", *FAST) == 0
    files = _files(tmp_path)
    assert set(files) == {"profile-3DXP.csv", "profile-Flash.csv"}
    out = tmp_path / "out"
    cfg = ["--set", "profiles.source=files",
           "--set", f"profiles.files.3DXP={out / 'profile-3DXP.csv'}",
           "--set", f"profiles.files.Flash={out / 'profile-Flash.csv'}"]
    assert run(["plan", *cfg, "-o", str(tmp_path / "plan")]) == 0
    assert (tmp_path / "plan" / "setup-grid-Flash.csv").exists()


def test_breakpoint_classification_matches_recomputed_costs(tmp_path):
    assert _run(tmp_path, "breakpoint", *F1) == 0
    with open(tmp_path / "out" / "classification.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 12 * 20
    for row in rows:
        a, b = row["3DXP_total_usd"], row["Flash_total_usd"]
        if a and b:
            want = "3DXP" if Fraction(a) <= Fraction(b) else "Flash"
            assert row["preferred"] == want
    doc = json.loads((tmp_path / "out" / "breakpoint.json").read_text())
    assert doc["premium"] == "3DXP" and doc["degenerate"] == "none"


def test_recommend_names_premium_and_both_totals(tmp_path):
    code = _run(tmp_path, "recommend", *F1, "--set", "trend.breakpoint_ratio=1.24",
                "--set", "trend.horizon_years=5.9")
    assert code == 0
    text = (tmp_path / "out" / "recommendation.txt").read_text()
    assert "3DXP" in text and "81,150" in text and "101,300" in text
    doc = json.loads((tmp_path / "out" / "recommendation.json").read_text())
    assert doc["chosen_technology"] == "3DXP"
    assert (tmp_path / "out" / "schedule.csv").exists()


def test_sensitivity_command(tmp_path):
    assert _run(tmp_path, "sensitivity", *F1) == 0
    with open(tmp_path / "out" / "sensitivity-tech2_price.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [float(r["value"]) for r in rows] == [0.2, 0.15, 0.1, 0.05]


@pytest.mark.parametrize("command", ["profile", "breakpoint", "recommend"])
def test_reruns_are_byte_identical(tmp_path, command):
    args = [command, *FAST, "--set", "technologies.Flash.queue_depth=4"]
    assert run([*args, "-o", str(tmp_path / "a")]) == 0
    assert run([*args, "-o", str(tmp_path / "b"), "-j", "2"]) == 0
    a = {p.name: p.read_bytes() for p in (tmp_path / "a").iterdir()}
    b = {p.name: p.read_bytes() for p in (tmp_path / "b").iterdir()}
    assert a == b and a
