"""Discrete-event kernel: event queue, clock, handlers, replications.

Events execute in (time, kind priority, sequence) order.  Expiry sorts before
spawn at equal timestamps so capacity freed at t is usable by a spawn at t;
wait-retry sorts last so a blocked agent re-checks after the expiry that woke
it has been applied.  A replication is strictly sequential; parallelism only
ever happens across replications, which share nothing mutable.
"""

from __future__ import annotations

import heapq
import time as _time
from collections import deque
from dataclasses import replace

from .agents import (
    IDLE_AT_DEPOT,
    PLANNER_OBSERVED,
    RETURNING,
    TO_TARGET,
    WAITING,
    Agent,
    Task,
    node_velocity,
    observe,
    plan_path,
)
from .config import SimConfig
from .errors import TimeTravel, Unreachable, ZeroRate
from .graph import ObservedGraph, SceneGraph, up_to_date
from .metrics import MetricsLedger
from .processes import ATTACHED, DISCARDED_CAPACITY, DISCARDED_PRIVATE, instantiate_processes
from .stochastic import RandomStream, next_nhpp_interarrival

SPAWN = "spawn"
EXPIRY = "expiry"
TASK_ARRIVAL = "task_arrival"
AGENT_NODE_ENTRY = "agent_node_entry"
AGENT_NODE_EXIT = "agent_node_exit"
WAIT_RETRY = "wait_retry"

KIND_PRIORITY = {
    EXPIRY: 0,
    SPAWN: 1,
    TASK_ARRIVAL: 2,
    AGENT_NODE_ENTRY: 3,
    AGENT_NODE_EXIT: 4,
    WAIT_RETRY: 5,
}


class SimState:
    """All mutable state of one replication."""

    def __init__(self, scenario: SceneGraph, config: SimConfig, seed: int,
                 trace=None):
        self.config = config
        self.seed = seed
        self.truth = scenario.dynamic_copy()
        self.belief = ObservedGraph(self.truth)
        self.clock = 0.0
        self.warmup_end = config.warmup
        self.t_end = config.duration
        self.trace = trace
        self._queue: list = []
        self._seq = 0
        self._object_serial = 0
        self._task_serial = 0
        self.rtf: float | None = None
        self._initialized = False

        self.ledger = MetricsLedger(
            config.warmup, config.duration, self.truth.registry.objects
        )
        self.instances = instantiate_processes(self.truth, config.processes, seed)

        depot_node = None
        if self.truth.depot_id is not None:
            depot_node = self.truth.access[self.truth.depot_id][0]
        self.fleet = [
            Agent(
                id=f"agent{i}",
                current_node=depot_node,
                default_velocity=config.fleet.default_velocity,
                width=config.fleet.agent_width,
                sensor_radius=config.fleet.sensor_radius,
            )
            for i in range(config.fleet.count if depot_node is not None else 0)
        ]
        self.idle_agents = deque(self.fleet)
        self.task_queue: deque = deque()
        self.waiting_at: dict[str, list[Agent]] = {}
        self._agents_by_id = {a.id: a for a in self.fleet}
        self._instances_by_key = {
            (inst.spec.name, inst.poi_id, inst.object_class): inst
            for inst in self.instances
        }
        self._task_streams: dict[tuple[str, str], tuple] = {}
        for spec in config.tasks:
            for poi_id in sorted(
                pid for pid, poi in self.truth.poi_nodes.items()
                if poi.semantic_class in spec.place_classes
            ):
                self._task_streams[(spec.name, poi_id)] = (
                    spec, RandomStream(seed, ("task", spec.name, poi_id))
                )
        self._edge_len: dict[tuple[str, str], float] = {}
        for u, nbrs in self.truth.adjacency.items():
            for v, length in nbrs:
                key = (u, v)
                if key not in self._edge_len or length < self._edge_len[key]:
                    self._edge_len[key] = length

    # -- scheduling -------------------------------------------------------------

    def schedule(self, t: float, kind: str, payload):
        if t < self.clock:
            raise TimeTravel(f"{kind} scheduled at {t} before clock {self.clock}")
        heapq.heappush(self._queue, (t, KIND_PRIORITY[kind], self._seq, kind, payload))
        self._seq += 1

    def initialize(self):
        """Schedule the first spawn per process and first arrival per task source."""
        if self._initialized:
            return
        self._initialized = True
        for inst in self.instances:
            try:
                dt = inst.source(0.0)
            except ZeroRate:
                continue
            self.schedule(dt, SPAWN, (inst.spec.name, inst.poi_id, inst.object_class))
        for (name, poi_id), (spec, stream) in self._task_streams.items():
            try:
                dt = next_nhpp_interarrival(spec.rate_profile, 0.0, stream)
            except ZeroRate:
                continue
            self.schedule(dt, TASK_ARRIVAL, (name, poi_id))

    # -- main loop ---------------------------------------------------------------

    def run(self, t_end: float | None = None):
        """Execute events until the queue drains or the clock passes t_end."""
        if t_end is None:
            t_end = self.t_end
        self.initialize()
        started = _time.perf_counter()
        handlers = {
            SPAWN: self._handle_spawn,
            EXPIRY: self._handle_expiry,
            TASK_ARRIVAL: self._handle_task_arrival,
            AGENT_NODE_ENTRY: self._handle_agent_entry,
            AGENT_NODE_EXIT: self._handle_agent_exit,
            WAIT_RETRY: self._handle_wait_retry,
        }
        executed = 0
        while self._queue and self._queue[0][0] <= t_end:
            t, _, _, kind, payload = heapq.heappop(self._queue)
            self.clock = t
            if self.trace is not None:
                self.trace(t, kind, payload)
            try:
                handlers[kind](t, payload)
            except Exception as exc:
                raise RuntimeError(
                    f"event #{executed} ({kind} at t={t}, payload={payload!r}) failed"
                ) from exc
            executed += 1
        self.clock = t_end
        self.ledger.finalize()
        wall = _time.perf_counter() - started
        self.rtf = t_end / wall if wall > 0 else float("inf")
        self.ledger.rtf = self.rtf
        return executed

    # -- shared helpers ------------------------------------------------------------

    def _touch_node(self, t: float, node: str):
        self.ledger.set_correct(t, node, up_to_date(self.belief, self.truth, node))

    def _merge_observation(self, agent: Agent, t: float):
        obs = observe(self.truth, agent, t)
        self.belief.merge_observation(obs, t)
        self.ledger.on_merge(t, obs)
        for node in obs.path_nodes:
            self._touch_node(t, node)

    def _planner_view(self):
        if self.config.fleet.planner_mode == PLANNER_OBSERVED:
            return self.belief, PLANNER_OBSERVED
        return self.truth, "static"

    # -- process events ---------------------------------------------------------------

    def _handle_spawn(self, t: float, key):
        inst = self._instances_by_key[key]
        object_id = f"obj{self._object_serial}"
        self._object_serial += 1
        outcome = inst.drain(t, self.truth, object_id, self.config.drain_search_bound)
        if outcome.status == ATTACHED:
            lifetime = inst.lifetime(t, outcome.obj)
            obj = replace(outcome.obj, t_lifetime=lifetime)
            self.truth.objects[obj.id] = obj
            self.ledger.counters["spawned"] += 1
            self.ledger.on_true_arrival(t, obj.attached_to)
            self.ledger.on_live_change(t, obj.semantic_class, +1)
            self._touch_node(t, obj.attached_to)
            self.schedule(t + lifetime, EXPIRY, obj.id)
        elif outcome.status == DISCARDED_PRIVATE:
            self.ledger.counters["discarded_private"] += 1
        elif outcome.status == DISCARDED_CAPACITY:
            self.ledger.counters["discarded_capacity"] += 1
        self.schedule(t + inst.source(t), SPAWN, key)

    def _handle_expiry(self, t: float, object_id: str):
        obj = self.truth.objects[object_id]
        node = obj.attached_to
        self.truth.remove_object(object_id)
        self.ledger.counters["expired"] += 1
        self.ledger.on_live_change(t, obj.semantic_class, -1)
        self._touch_node(t, node)
        for agent in self.waiting_at.get(node, ()):
            self.schedule(t, WAIT_RETRY, agent.id)

    # -- task events --------------------------------------------------------------------

    def _handle_task_arrival(self, t: float, payload):
        spec, stream = self._task_streams[payload]
        _, poi_id = payload
        task = Task(id=f"task{self._task_serial}", target_poi=poi_id, t_issued=t)
        self._task_serial += 1
        self.ledger.counters["tasks_issued"] += 1
        self.task_queue.append(task)
        self._try_dispatch(t)
        self.schedule(t + next_nhpp_interarrival(spec.rate_profile, t, stream),
                      TASK_ARRIVAL, payload)

    def _try_dispatch(self, t: float):
        while self.task_queue and self.idle_agents:
            task = self.task_queue.popleft()
            agent = self.idle_agents.popleft()
            self._assign(t, agent, task)

    def _assign(self, t: float, agent: Agent, task: Task):
        """FIFO assignment; prediction is the round-trip cost on the planner view."""
        view, mode = self._planner_view()
        path_out, cost_out = plan_path(view, agent.current_node, task.target_poi,
                                       agent, mode)
        _, cost_back = plan_path(view, task.target_poi, agent.current_node,
                                 agent, mode)
        task.t_assigned = t
        task.t_pred = t + cost_out + cost_back
        agent.task = task
        agent.state = TO_TARGET
        agent.path = path_out
        agent.path_index = 0
        agent.plan_version = self.belief.version
        if len(path_out) == 1:
            self._leg_complete(agent, t)
        else:
            self._merge_observation(agent, t)  # exit observation when departing
            self._advance(agent, t)

    # -- agent movement -------------------------------------------------------------------

    def _advance(self, agent: Agent, t: float):
        next_node = agent.path[agent.path_index + 1]
        length = self._edge_len[(agent.current_node, next_node)]
        self.schedule(t + length / agent.default_velocity, AGENT_NODE_ENTRY,
                      (agent.id, next_node))

    def _handle_agent_entry(self, t: float, payload):
        agent_id, node = payload
        agent = self._agents_by_id[agent_id]
        agent.current_node = node
        agent.path_index += 1
        self._merge_observation(agent, t)

        if (self.config.fleet.planner_mode == PLANNER_OBSERVED
                and agent.plan_version != self.belief.version
                and node != agent.destination):
            try:
                new_path, _ = plan_path(self.belief, node, agent.destination,
                                        agent, PLANNER_OBSERVED)
                agent.path = new_path
                agent.path_index = 0
            except Unreachable:
                pass  # keep the committed path; physics will decide
            agent.plan_version = self.belief.version

        self._start_dwell_or_wait(agent, t)

    def _start_dwell_or_wait(self, agent: Agent, t: float):
        node = self.truth.path_nodes[agent.current_node]
        nu = node_velocity(node, self.truth.footprint_sum(agent.current_node),
                           agent.width, agent.default_velocity)
        if nu == 0.0:
            agent.resume_state = agent.state
            agent.state = WAITING
            self.waiting_at.setdefault(agent.current_node, []).append(agent)
            return
        dwell = node.segment_length / nu
        self.schedule(t + dwell, AGENT_NODE_EXIT, (agent.id, agent.current_node))

    def _handle_agent_exit(self, t: float, payload):
        agent_id, node = payload
        agent = self._agents_by_id[agent_id]
        self._merge_observation(agent, t)
        if agent.path_index == len(agent.path) - 1:
            self._leg_complete(agent, t)
        else:
            self._advance(agent, t)

    def _handle_wait_retry(self, t: float, agent_id: str):
        agent = self._agents_by_id[agent_id]
        if agent.state != WAITING:
            return
        node = self.truth.path_nodes[agent.current_node]
        nu = node_velocity(node, self.truth.footprint_sum(agent.current_node),
                           agent.width, agent.default_velocity)
        if nu == 0.0:
            return
        self.waiting_at[agent.current_node].remove(agent)
        agent.state = agent.resume_state
        self._merge_observation(agent, t)
        dwell = node.segment_length / nu
        self.schedule(t + dwell, AGENT_NODE_EXIT, (agent.id, agent.current_node))

    def _leg_complete(self, agent: Agent, t: float):
        if agent.state == TO_TARGET:
            view, mode = self._planner_view()
            depot_node = self.truth.access[self.truth.depot_id][0]
            path_back, _ = plan_path(view, agent.current_node, depot_node,
                                     agent, mode)
            agent.state = RETURNING
            agent.path = path_back
            agent.path_index = 0
            agent.plan_version = self.belief.version
            if len(path_back) == 1:
                self._leg_complete(agent, t)
            else:
                self._advance(agent, t)
        else:
            task = agent.task
            task.t_completed = t
            self.ledger.record_task(task)
            self.ledger.counters["tasks_completed"] += 1
            agent.task = None
            agent.state = IDLE_AT_DEPOT
            agent.path = []
            agent.path_index = 0
            self.idle_agents.append(agent)
            self._try_dispatch(t)


def measure_rtf(state: SimState) -> float:
    if state.rtf is None:
        raise RuntimeError("run() has not completed")
    return state.rtf


def run_replications(scenario: SceneGraph, config: SimConfig, n: int,
                     base_seed: int, trace_factory=None):
    """Run n independent replications with derived seeds base_seed ^ i.

    ``trace_factory(i)`` may return a per-replication trace callback.
    Returns the list of finalized ledgers.
    """
    if n < 1:
        raise ValueError("need at least one replication")
    ledgers = []
    for i in range(n):
        trace = trace_factory(i) if trace_factory is not None else None
        state = SimState(scenario, config, base_seed ^ i, trace=trace)
        state.run()
        ledgers.append(state.ledger)
    return ledgers
