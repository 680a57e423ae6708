"""Regenerate the bundled micro scenario and its run config.

The files under src/scenesim/data/ are committed; re-run this script only
when the synthetic builders or the file formats change.
"""

from pathlib import Path

from scenesim.scenario import load_config, load_scenario, save_scenario
from scenesim.synthetic import grid_scenario

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "scenesim" / "data"

MICRO_CONFIG = """\
# Run config for the bundled micro scenario (synthetic placeholder rates).

processes:
  - name: parked_cars
    source_classes: [housing, retail]
    object_classes: [car]
    hourly_rates: [3, 3, 3, 3, 3, 3, 2, 2, 1, 1, 1, 1,
                   1, 1, 1, 1, 2, 2, 2, 3, 3, 3, 3, 3]
    footprint_area: 2.0
    sidewalk_probability: 0.9
    lifetime_mean: 3600.0
  - name: bicycles
    source_classes: [housing, education]
    object_classes: [bicycle]
    hourly_rates: [1, 1, 1, 1, 1, 1, 2, 3, 3, 2, 2, 2,
                   2, 2, 2, 2, 3, 3, 2, 1, 1, 1, 1, 1]
    footprint_area: 1.0
    lifetime_mean: 7200.0

tasks:
  - name: deliveries
    place_classes: [housing, retail]
    hourly_rates: [0, 0, 0, 0, 0, 0, 1, 1, 2, 2, 2, 2,
                   2, 2, 2, 2, 1, 1, 1, 1, 0, 0, 0, 0]

fleet:
  count: 2
  default_velocity: 1.5
  agent_width: 0.5
  sensor_radius: 25.0
  planner_mode: observed

sim:
  duration_days: 0.25
  warmup_hours: 1
  replications: 2
  seed: 1
"""


def main():
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    scenario_path = DATA_DIR / "micro_scenario.json"
    config_path = DATA_DIR / "micro_config.yaml"

    graph = grid_scenario(5, 5)
    save_scenario(graph, scenario_path, name="micro")
    config_path.write_text(MICRO_CONFIG)

    # sanity: the bundled pair must load and cross-validate
    loaded = load_scenario(scenario_path)
    load_config(config_path, loaded)
    print(f"wrote {scenario_path} ({len(loaded.path_nodes)} path nodes, "
          f"{len(loaded.poi_nodes)} PoIs) and {config_path}")


if __name__ == "__main__":
    main()
