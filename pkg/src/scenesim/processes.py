"""Object lifecycle processes: spawning, capacity-based draining, expiry.

One process instance exists per (matching PoI, object class) pair.  Each
instance owns an independent random stream, samples spawn inter-arrivals from
its rate profile, drains new objects to the nearest path node with free
capacity, and draws exponential lifetimes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import stochastic
from .errors import ValidationError
from .graph import ObjectNode, SceneGraph
from .routing import nearest_matching_node
from .stochastic import RandomStream, RateProfile, balanced_mean_lifetime

DEFAULT_SEARCH_BOUND = 300.0

ATTACHED = "attached"
DISCARDED_PRIVATE = "discarded_private"
DISCARDED_CAPACITY = "discarded_capacity"


@dataclass
class ProcessSpec:
    """Declares one object-spawning rule for a set of place classes."""

    name: str
    source_classes: frozenset
    object_classes: frozenset
    rate_profile: RateProfile
    footprint_area: float
    sidewalk_probability: float = 1.0
    lifetime_mean: float | None = None
    target_population: float | None = None

    def __post_init__(self):
        if (self.lifetime_mean is None) == (self.target_population is None):
            raise ValidationError(
                [f"process {self.name!r}: exactly one of lifetime_mean/"
                 f"target_population must be set"]
            )


@dataclass
class DrainOutcome:
    status: str
    obj: ObjectNode | None = None


@dataclass
class ProcessInstance:
    """A spec bound to one PoI and one object class, with its own stream."""

    spec: ProcessSpec
    poi_id: str
    object_class: str
    stream: RandomStream
    lifetime_mean: float = 0.0
    # test hooks: override sampling with pre-drawn variate iterators
    interarrival_fn: object = None
    lifetime_fn: object = None

    def source(self, t: float) -> float:
        """Seconds until this instance's next spawn event."""
        if self.interarrival_fn is not None:
            return self.interarrival_fn(t)
        return stochastic.next_nhpp_interarrival(self.spec.rate_profile, t, self.stream)

    def drain(self, t: float, graph: SceneGraph, object_id: str,
              search_bound: float = DEFAULT_SEARCH_BOUND) -> DrainOutcome:
        """Attach a fresh object at the nearest path node with a free slot.

        With probability 1 - sidewalk_probability the object stays on private
        ground and never enters the graph.  The capacity search runs Dijkstra
        from the PoI's access node and gives up beyond ``search_bound`` meters
        of network distance.
        """
        if not stochastic.bernoulli(self.spec.sidewalk_probability, self.stream):
            return DrainOutcome(DISCARDED_PRIVATE)
        access_node, _ = graph.access[self.poi_id]
        target = nearest_matching_node(
            graph.adjacency,
            access_node,
            lambda n: graph.free_capacity(n, self.object_class) > 0,
            search_bound,
        )
        if target is None:
            return DrainOutcome(DISCARDED_CAPACITY)
        obj = ObjectNode(
            id=object_id,
            semantic_class=self.object_class,
            t_spawn=t,
            t_lifetime=0.0,  # set when the lifetime is drawn
            footprint_area=self.spec.footprint_area,
            attached_to=target,
        )
        graph.attach_object(obj)
        return DrainOutcome(ATTACHED, obj)

    def lifetime(self, t: float, obj: ObjectNode) -> float:
        if self.lifetime_fn is not None:
            return self.lifetime_fn(t, obj)
        return stochastic.sample_exponential(self.lifetime_mean, self.stream)


def instantiate_processes(graph: SceneGraph, specs: list[ProcessSpec],
                          seed: int) -> list[ProcessInstance]:
    """One instance per (PoI with class in C_q) x (object class in C_d).

    Lifetime means declared via target_population are resolved here with the
    Little's-law balance: the aggregate effective arrival rate of a class is
    summed over every instance spawning it, weighted by sidewalk probability
    (privately discarded objects never enter the graph).
    """
    instances: list[ProcessInstance] = []
    for spec in specs:
        pois = sorted(
            pid for pid, poi in graph.poi_nodes.items()
            if poi.semantic_class in spec.source_classes
        )
        for poi_id in pois:
            for cls in sorted(spec.object_classes):
                instances.append(ProcessInstance(
                    spec=spec,
                    poi_id=poi_id,
                    object_class=cls,
                    stream=RandomStream(seed, ("process", spec.name, poi_id, cls)),
                ))

    # aggregate effective arrival rate per object class, in 1/s
    class_rate: dict[str, float] = {}
    for inst in instances:
        rate = inst.spec.rate_profile.mean_rate_per_second * inst.spec.sidewalk_probability
        class_rate[inst.object_class] = class_rate.get(inst.object_class, 0.0) + rate

    for inst in instances:
        if inst.spec.lifetime_mean is not None:
            inst.lifetime_mean = inst.spec.lifetime_mean
        else:
            inst.lifetime_mean = balanced_mean_lifetime(
                class_rate[inst.object_class], inst.spec.target_population
            )
    return instances
