"""Discrete-event simulation of dynamic scene graphs under partial observation."""

from .graph import (
    ClassRegistry,
    DEFAULT_REGISTRY,
    Edge,
    ObjectNode,
    Observation,
    ObservedGraph,
    PathNode,
    PoiNode,
    SceneGraph,
    up_to_date,
)
from .stochastic import (
    RandomStream,
    RateProfile,
    balanced_mean_lifetime,
    bernoulli,
    next_nhpp_interarrival,
    sample_exponential,
)
from .processes import ProcessSpec, ProcessInstance, instantiate_processes
from .agents import Agent, Task, node_penalty, node_velocity, observe, plan_path
from .config import FleetConfig, SimConfig, TaskSpec
from .kernel import SimState, measure_rtf, run_replications
from .metrics import MetricsLedger, task_delay
from .scenario import load_config, load_scenario, save_scenario

__version__ = "0.1.0"
