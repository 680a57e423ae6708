"""Mobile agents: obstacle-dependent travel costs, planning, observation.

Agents move on the path network, pay a dwell time at every node they enter
that grows with obstacle density on the node's sidewalk segment, and sense
all nodes within their sensor radius on every node entry and exit.  Planning
runs either on the bare static network or on the shared belief graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidGeometry
from .graph import Observation, ObservedGraph, PathNode, SceneGraph
from .routing import astar

IDLE_AT_DEPOT = "idle_at_depot"
TO_TARGET = "to_target"
RETURNING = "returning"
WAITING = "waiting"

PLANNER_STATIC = "static"
PLANNER_OBSERVED = "observed"


@dataclass
class Agent:
    id: str
    current_node: str
    default_velocity: float
    width: float
    sensor_radius: float
    state: str = IDLE_AT_DEPOT
    path: list = field(default_factory=list)
    path_index: int = 0
    plan_version: int = -1
    task: object = None
    resume_state: str = TO_TARGET  # movement phase to restore after waiting

    @property
    def destination(self) -> str | None:
        return self.path[-1] if self.path else None


@dataclass
class Task:
    id: str
    target_poi: str
    t_issued: float
    t_assigned: float | None = None
    t_pred: float | None = None
    t_completed: float | None = None


def node_velocity(node: PathNode, footprint_sum: float, agent_width: float,
                  default_velocity: float) -> float:
    """Agent velocity over the node's segment under the linear density model.

    The free area not swept by the agent is l_s * (b_s - b_agent); occupied
    footprint shrinks it linearly and the velocity clamps at zero when
    obstacles fill the free area.
    """
    if agent_width >= node.sidewalk_width:
        raise InvalidGeometry(
            f"agent width {agent_width} >= sidewalk width {node.sidewalk_width} "
            f"at node {node.id!r}"
        )
    a_free = node.segment_length * (node.sidewalk_width - agent_width)
    return max((a_free - footprint_sum) / a_free * default_velocity, 0.0)


def node_penalty(node: PathNode, footprint_sum: float, agent_width: float,
                 default_velocity: float) -> float:
    """Additional traversal time caused by obstacles; inf when blocked."""
    nu = node_velocity(node, footprint_sum, agent_width, default_velocity)
    if nu == 0.0:
        return math.inf
    return node.segment_length / nu - node.segment_length / default_velocity


def plan_path(view, start: str, goal: str, agent: Agent,
              mode: str = PLANNER_OBSERVED) -> tuple[list[str], float]:
    """Minimum travel-time path between two path-network nodes.

    PoI endpoints resolve through their access edge.  Per-edge cost is
    length/velocity plus the full dwell at the target node; in observed mode
    the dwell uses the believed obstacle footprint (nodes believed blocked are
    excluded), in static mode it is the empty-segment dwell.  The cost of a
    path therefore equals the time an agent needs to traverse it when the
    world matches the planning view.
    """
    start = _resolve(view, start)
    goal = _resolve(view, goal)
    v = agent.default_velocity

    if mode == PLANNER_OBSERVED:
        def node_cost(nid):
            node = view.path_nodes[nid]
            nu = node_velocity(node, view.footprint_sum(nid), agent.width, v)
            if nu == 0.0:
                return math.inf
            return node.segment_length / nu
    else:
        def node_cost(nid):
            node = view.path_nodes[nid]
            return node.segment_length / v

    return astar(view.adjacency, view.node_position, start, goal, v, node_cost)


def _resolve(view, node_id: str) -> str:
    if node_id in view.poi_nodes:
        return view.access[node_id][0]
    return node_id


def observe(truth: SceneGraph, agent: Agent, t: float) -> Observation:
    """Noiseless induced subgraph within the agent's sensor radius."""
    center = truth.node_position(agent.current_node)
    return truth.radius_subgraph(center, agent.sensor_radius, t)
