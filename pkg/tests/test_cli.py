"""Command-line interface: exit codes, outputs, reproducibility."""

import json

import pytest

from scenesim.cli import main
from scenesim.scenario import load_scenario, save_scenario
from scenesim.synthetic import grid_scenario

CONFIG_YAML = """\
processes:
  - name: cars
    source_classes: [housing, retail]
    object_classes: [car]
    hourly_rates: [2, 2, 2, 2, 2, 2, 1, 1, 1, 1, 1, 1,
                   1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2]
    footprint_area: 2.0
    lifetime_mean: 3600.0

tasks:
  - name: visits
    place_classes: [housing]
    hourly_rates: [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1,
                   1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]

fleet:
  count: 1

sim:
  duration_days: 0.5
  warmup_hours: 1
  replications: 1
  seed: 3
"""


@pytest.fixture()
def workspace(tmp_path):
    scenario = tmp_path / "scenario.json"
    save_scenario(grid_scenario(4, 4), scenario)
    config = tmp_path / "config.yaml"
    config.write_text(CONFIG_YAML)
    return tmp_path, scenario, config


def read_outputs(outdir, skip_rtf=True):
    """All CSV bytes, with the wall-clock-dependent rtf rows removed."""
    blobs = {}
    for path in sorted(outdir.glob("*.csv")):
        lines = path.read_text().splitlines()
        if skip_rtf:
            lines = [l for l in lines if ",rtf," not in l]
        blobs[path.name] = "\n".join(lines)
    return blobs


class TestValidate:
    def test_valid_pair_exits_zero(self, workspace, capsys):
        _, scenario, config = workspace
        assert main(["validate", str(scenario), str(config)]) == 0
        out = capsys.readouterr().out
        assert "ok" in out

    def test_invalid_scenario_exits_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"classes": {}, "path_nodes": [],
                                   "poi_nodes": [], "edges": []}))
        assert main(["validate", str(bad)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_unparseable_scenario_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        assert main(["validate", str(bad)]) == 1


class TestRun:
    def test_writes_all_csvs(self, workspace):
        tmp, scenario, config = workspace
        out = tmp / "out"
        assert main(["run", str(scenario), str(config), "--out", str(out)]) == 0
        names = {p.name for p in out.iterdir()}
        assert {"summary.csv", "daily_trends.csv", "arrivals_by_node_hour.csv",
                "heatmap.csv", "tasks.csv"} <= names

    def test_same_seed_byte_identical_outputs(self, workspace):
        tmp, scenario, config = workspace
        outs = []
        for name in ("a", "b"):
            out = tmp / name
            assert main(["run", str(scenario), str(config), "--out", str(out),
                         "--seed", "7"]) == 0
            outs.append(read_outputs(out))
        assert outs[0] == outs[1]

    def test_seed_override_changes_results(self, workspace):
        tmp, scenario, config = workspace
        blobs = {}
        for seed in ("7", "8"):
            out = tmp / f"s{seed}"
            main(["run", str(scenario), str(config), "--out", str(out),
                  "--seed", seed])
            blobs[seed] = read_outputs(out)
        assert blobs["7"] != blobs["8"]

    def test_trace_files_written(self, workspace):
        tmp, scenario, config = workspace
        out = tmp / "out"
        assert main(["run", str(scenario), str(config), "--out", str(out),
                     "--trace", "--replications", "2"]) == 0
        for i in range(2):
            lines = (out / f"trace_{i}.ndjson").read_text().splitlines()
            assert lines
            first = json.loads(lines[0])
            assert {"t", "kind", "payload"} <= set(first)

    def test_bad_warmup_override_exits_two(self, workspace, capsys):
        tmp, scenario, config = workspace
        code = main(["run", str(scenario), str(config), "--out",
                     str(tmp / "o"), "--days", "0.1", "--warmup-hours", "5"])
        assert code == 2


class TestSample:
    def test_truth_only_run(self, workspace):
        tmp, scenario, config = workspace
        out = tmp / "sample"
        assert main(["sample", str(scenario), str(config), "--out", str(out),
                     "--days", "1"]) == 0
        summary = (out / "summary.csv").read_text()
        assert "tasks_completed,0" in summary
        trends = (out / "daily_trends.csv").read_text()
        assert "car" in trends


class TestScaffolding:
    def test_init_config_then_validate(self, workspace, capsys):
        tmp, scenario, _ = workspace
        cfg = tmp / "fresh.yaml"
        assert main(["init-config", str(cfg)]) == 0
        assert main(["validate", str(scenario), str(cfg)]) == 0

    def test_import_command(self, tmp_path, capsys):
        from test_osm import golden_extract

        src = tmp_path / "extract.osm"
        src.write_text(golden_extract())
        out = tmp_path / "scenario.json"
        code = main(["import", str(src), str(out), "--center", "0", "0",
                     "--radius", "200", "--max-segment", "20"])
        assert code == 0
        graph = load_scenario(out)
        assert len(graph.path_nodes) == 4
        assert graph.depot_id == "p20"
