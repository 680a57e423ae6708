"""Scenario (JSON) and run-config (YAML) files: load, save, validate.

The scenario file is the serialized static scene graph: class registry,
path nodes with capacities and sidewalk geometry, PoI nodes, adjacency and
access edges, and the depot id.  The config file declares processes, task
generators, fleet parameters, and run control.  Loading validates against
every graph invariant and reports all violations at once.
"""

from __future__ import annotations

import json
import math
from collections import deque
from pathlib import Path

import yaml

from .config import FleetConfig, SimConfig, TaskSpec
from .errors import ParseError, ValidationError
from .graph import ClassRegistry, PathNode, PoiNode, SceneGraph
from .processes import ProcessSpec
from .stochastic import RateProfile

SCENARIO_VERSION = 1


def save_scenario(graph: SceneGraph, path, name: str = "scenario",
                  center=(0.0, 0.0), radius: float = 0.0):
    """Serialize the static subgraph to JSON (sorted keys, stable bytes)."""
    data = {
        "version": SCENARIO_VERSION,
        "name": name,
        "center": list(center),
        "radius": radius,
        "classes": {
            "places": sorted(graph.registry.places),
            "objects": sorted(graph.registry.objects),
        },
        "depot": graph.depot_id,
        "path_nodes": [
            {
                "id": n.id, "x": n.x, "y": n.y, "class": n.semantic_class,
                "capacity": {k: n.capacity[k] for k in sorted(n.capacity)},
                "segment_length": n.segment_length,
                "sidewalk_width": n.sidewalk_width,
            }
            for n in (graph.path_nodes[i] for i in sorted(graph.path_nodes))
        ],
        "poi_nodes": [
            {"id": n.id, "x": n.x, "y": n.y, "class": n.semantic_class}
            for n in (graph.poi_nodes[i] for i in sorted(graph.poi_nodes))
        ],
        "edges": [
            {"kind": e.kind, "u": e.u, "v": e.v,
             "directed": e.directed, "length": e.length}
            for e in sorted(graph.static_edges, key=lambda e: (e.kind, e.u, e.v))
        ],
    }
    Path(path).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")


def load_scenario(path) -> SceneGraph:
    """Parse and validate a scenario file into a frozen scene graph."""
    try:
        data = json.loads(Path(path).read_text())
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return scenario_from_dict(data)


def scenario_from_dict(data: dict) -> SceneGraph:
    violations: list[str] = []

    classes = data.get("classes", {})
    places = set(classes.get("places", ()))
    objects = set(classes.get("objects", ()))
    overlap = places & objects
    if overlap:
        violations.append(f"classes: place/object overlap {sorted(overlap)}")
        objects -= overlap
    registry = ClassRegistry(frozenset(places), frozenset(objects))
    graph = SceneGraph(registry)

    flagged = [str(p["id"]) for p in data.get("poi_nodes", ()) if p.get("is_depot")]
    depot_id = data.get("depot")
    if depot_id is None and len(flagged) == 1:
        depot_id = flagged[0]
    if len(flagged) > 1:
        violations.append(f"depot: multiple depots declared: {flagged}")
    if depot_id is None:
        violations.append("depot: no depot declared")
    elif not any(str(p["id"]) == str(depot_id) for p in data.get("poi_nodes", ())):
        violations.append(f"depot: {depot_id!r} is not a PoI node")

    for i, spec in enumerate(data.get("path_nodes", ())):
        field_path = f"path_nodes[{i}]"
        try:
            node = PathNode(
                id=str(spec["id"]), x=float(spec["x"]), y=float(spec["y"]),
                semantic_class=spec["class"],
                capacity={k: int(v) for k, v in spec.get("capacity", {}).items()},
                segment_length=float(spec["segment_length"]),
                sidewalk_width=float(spec["sidewalk_width"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            violations.append(f"{field_path}: {exc!r}")
            continue
        if not (math.isfinite(node.x) and math.isfinite(node.y)):
            violations.append(f"{field_path}.position: not finite")
        if node.semantic_class not in places:
            violations.append(f"{field_path}.class: undeclared {node.semantic_class!r}")
        for cls, cap in node.capacity.items():
            if cls not in objects:
                violations.append(f"{field_path}.capacity: undeclared class {cls!r}")
            if cap < 0:
                violations.append(f"{field_path}.capacity[{cls}]: negative")
        if node.segment_length <= 0:
            violations.append(f"{field_path}.segment_length: must be positive")
        if node.sidewalk_width <= 0:
            violations.append(f"{field_path}.sidewalk_width: must be positive")
        try:
            graph.add_path_node(node)
        except Exception as exc:
            violations.append(f"{field_path}: {exc}")

    for i, spec in enumerate(data.get("poi_nodes", ())):
        field_path = f"poi_nodes[{i}]"
        try:
            node = PoiNode(
                id=str(spec["id"]), x=float(spec["x"]), y=float(spec["y"]),
                semantic_class=spec["class"],
                is_depot=(spec["id"] == depot_id),
            )
        except (KeyError, TypeError, ValueError) as exc:
            violations.append(f"{field_path}: {exc!r}")
            continue
        if node.semantic_class not in places:
            violations.append(f"{field_path}.class: undeclared {node.semantic_class!r}")
        elif node.semantic_class == "sidewalk":
            violations.append(f"{field_path}.class: PoI may not be a sidewalk")
        try:
            graph.add_poi_node(node)
        except Exception as exc:
            violations.append(f"{field_path}: {exc}")

    for i, spec in enumerate(data.get("edges", ())):
        field_path = f"edges[{i}]"
        kind = spec.get("kind")
        u, v = spec.get("u"), spec.get("v")
        try:
            if kind == "adjacency":
                graph.add_adjacency_edge(u, v, float(spec["length"]),
                                         bool(spec.get("directed", False)))
            elif kind == "access":
                graph.add_access_edge(u, v, float(spec["length"]))
            else:
                violations.append(f"{field_path}.kind: unknown {kind!r}")
        except Exception as exc:
            violations.append(f"{field_path}: {exc}")

    for poi_id in graph.poi_nodes:
        if poi_id not in graph.access:
            violations.append(f"poi {poi_id!r}: missing access edge")

    if graph.path_nodes and not _path_network_connected(graph):
        violations.append("path network is not connected")

    if violations:
        raise ValidationError(violations)
    graph.freeze_static()
    return graph


def _path_network_connected(graph: SceneGraph) -> bool:
    # weak connectivity: directed edges treated as traversable both ways
    undirected: dict[str, set] = {nid: set() for nid in graph.path_nodes}
    for edge in graph.static_edges:
        if edge.kind == "adjacency":
            undirected[edge.u].add(edge.v)
            undirected[edge.v].add(edge.u)
    start = next(iter(graph.path_nodes))
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nbr in undirected[node]:
            if nbr not in seen:
                seen.add(nbr)
                queue.append(nbr)
    return len(seen) == len(graph.path_nodes)


# -- config -----------------------------------------------------------------------


def load_config(path, graph: SceneGraph | None = None) -> SimConfig:
    """Parse a YAML run config; validate class references against the scenario."""
    try:
        data = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a mapping at top level")
    return config_from_dict(data, graph)


def config_from_dict(data: dict, graph: SceneGraph | None = None) -> SimConfig:
    violations: list[str] = []
    places = graph.registry.places if graph is not None else None
    objects = graph.registry.objects if graph is not None else None

    def check_classes(names, universe, where):
        if universe is None:
            return
        for name in names:
            if name not in universe:
                violations.append(f"{where}: undeclared class {name!r}")

    processes = []
    for i, spec in enumerate(data.get("processes", ()) or ()):
        where = f"processes[{i}]"
        try:
            name = spec.get("name", f"process{i}")
            source_classes = frozenset(spec["source_classes"])
            object_classes = frozenset(spec["object_classes"])
            check_classes(source_classes, places, f"{where}.source_classes")
            check_classes(object_classes, objects, f"{where}.object_classes")
            profile = RateProfile(tuple(spec["hourly_rates"]))
            footprint = float(spec["footprint_area"])
            if footprint <= 0:
                violations.append(f"{where}.footprint_area: must be positive")
            lifetime_mean = spec.get("lifetime_mean")
            target_population = spec.get("target_population")
            sidewalk_p = float(spec.get("sidewalk_probability", 1.0))
            if not 0.0 <= sidewalk_p <= 1.0:
                violations.append(f"{where}.sidewalk_probability: outside [0, 1]")
            processes.append(ProcessSpec(
                name=name,
                source_classes=source_classes,
                object_classes=object_classes,
                rate_profile=profile,
                footprint_area=footprint,
                sidewalk_probability=sidewalk_p,
                lifetime_mean=None if lifetime_mean is None else float(lifetime_mean),
                target_population=(None if target_population is None
                                   else float(target_population)),
            ))
        except ValidationError as exc:
            violations.extend(f"{where}: {v}" for v in exc.violations)
        except (KeyError, TypeError, ValueError) as exc:
            violations.append(f"{where}: {exc!r}")

    tasks = []
    for i, spec in enumerate(data.get("tasks", ()) or ()):
        where = f"tasks[{i}]"
        try:
            place_classes = frozenset(spec["place_classes"])
            check_classes(place_classes, places, f"{where}.place_classes")
            tasks.append(TaskSpec(
                name=spec.get("name", f"tasks{i}"),
                place_classes=place_classes,
                rate_profile=RateProfile(tuple(spec["hourly_rates"])),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            violations.append(f"{where}: {exc!r}")

    fleet_data = data.get("fleet", {}) or {}
    fleet = FleetConfig(
        count=int(fleet_data.get("count", 1)),
        default_velocity=float(fleet_data.get("default_velocity", 1.5)),
        agent_width=float(fleet_data.get("agent_width", 0.5)),
        sensor_radius=float(fleet_data.get("sensor_radius", 20.0)),
        planner_mode=fleet_data.get("planner_mode", "observed"),
    )
    if fleet.planner_mode not in ("static", "observed"):
        violations.append(f"fleet.planner_mode: unknown {fleet.planner_mode!r}")
    if fleet.default_velocity <= 0:
        violations.append("fleet.default_velocity: must be positive")
    if fleet.sensor_radius < 0:
        violations.append("fleet.sensor_radius: must be non-negative")

    sim = data.get("sim", {}) or {}
    duration = float(sim.get("duration_days", 22)) * 86400.0
    warmup = float(sim.get("warmup_hours", 48)) * 3600.0
    if duration <= 0:
        violations.append("sim.duration_days: must be positive")
    if not 0 <= warmup < duration:
        violations.append("sim.warmup_hours: must lie inside the run duration")
    replications = int(sim.get("replications", 5))
    if replications < 1:
        violations.append("sim.replications: must be >= 1")
    bound = float(sim.get("drain_search_bound", 300.0))
    if bound <= 0:
        violations.append("sim.drain_search_bound: must be positive")

    if violations:
        raise ValidationError(violations)
    return SimConfig(
        processes=processes,
        tasks=tasks,
        fleet=fleet,
        duration=duration,
        warmup=warmup,
        replications=replications,
        seed=int(sim.get("seed", 1)),
        drain_search_bound=bound,
    )


CONFIG_TEMPLATE = """\
# scenesim run configuration
#
# Rates are arrivals per hour, 24 bins indexed by hour-of-day.
# Capacities, rates, and lifetimes below are synthetic placeholders, not
# values calibrated from real statistics.

processes:
  - name: housing_cars
    source_classes: [housing]
    object_classes: [car]
    # night maximum, midday minimum
    hourly_rates: [6, 6, 6, 6, 6, 5, 4, 3, 2, 1, 1, 1,
                   1, 1, 2, 2, 3, 4, 5, 5, 6, 6, 6, 6]
    footprint_area: 4.0
    sidewalk_probability: 1.0
    lifetime_mean: 14400.0        # seconds; or use target_population instead

tasks:
  - name: deliveries
    place_classes: [housing, retail]
    hourly_rates: [0, 0, 0, 0, 0, 0, 1, 2, 3, 3, 3, 4,
                   4, 3, 3, 3, 2, 2, 2, 1, 1, 0, 0, 0]

fleet:
  count: 2
  default_velocity: 1.5           # m/s
  agent_width: 0.5                # m
  sensor_radius: 20.0             # m
  planner_mode: observed          # observed | static

sim:
  duration_days: 22
  warmup_hours: 48
  replications: 5
  seed: 1
  drain_search_bound: 300.0       # m network distance for the capacity search
"""


def write_config_template(path):
    Path(path).write_text(CONFIG_TEMPLATE)
