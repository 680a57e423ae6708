"""Dynamic scene graph: true world state, belief copy, and the merge operator.

The world is a typed graph with a static part (path network + points of
interest) that never changes after load, and a dynamic part (objects attached
to path nodes) that is mutated by spawn/expiry events.  The belief graph
shares the static part and tracks its own object population, updated only by
merging range-limited observations of the true graph.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field, replace

from .errors import (
    CapacityExceeded,
    DuplicateId,
    UnknownId,
    UnknownStaticNode,
)

EDGE_ADJACENCY = "adjacency"
EDGE_ACCESS = "access"
EDGE_ATTACHMENT = "attachment"


@dataclass(frozen=True)
class ClassRegistry:
    """Declared semantic classes; place and object classes are disjoint."""

    places: frozenset[str]
    objects: frozenset[str]

    def __post_init__(self):
        overlap = self.places & self.objects
        if overlap:
            raise ValueError(f"place/object classes overlap: {sorted(overlap)}")


DEFAULT_REGISTRY = ClassRegistry(
    places=frozenset({"sidewalk", "work", "education", "leisure", "housing", "retail"}),
    objects=frozenset({"car", "bicycle", "trashcan"}),
)


@dataclass(frozen=True)
class PathNode:
    id: str
    x: float
    y: float
    semantic_class: str
    capacity: dict  # object class -> slot count
    segment_length: float
    sidewalk_width: float


@dataclass(frozen=True)
class PoiNode:
    id: str
    x: float
    y: float
    semantic_class: str
    is_depot: bool = False


@dataclass(frozen=True)
class ObjectNode:
    id: str
    semantic_class: str
    t_spawn: float
    t_lifetime: float
    footprint_area: float
    attached_to: str


@dataclass(frozen=True)
class Edge:
    kind: str
    u: str
    v: str
    directed: bool = False
    length: float | None = None


@dataclass(frozen=True)
class Observation:
    """Induced subgraph snapshot taken at time ``t``.

    Object nodes are frozen, so sharing instances with the true graph is safe.
    """

    t: float
    path_nodes: frozenset[str]
    poi_nodes: frozenset[str]
    objects_at: dict  # path node id -> tuple of ObjectNode
    edges: tuple


class SceneGraph:
    """True world state: static infrastructure plus live objects."""

    def __init__(self, registry: ClassRegistry = DEFAULT_REGISTRY):
        self.registry = registry
        self.path_nodes: dict[str, PathNode] = {}
        self.poi_nodes: dict[str, PoiNode] = {}
        self.objects: dict[str, ObjectNode] = {}
        # path node id -> list of (neighbor path node id, length)
        self.adjacency: dict[str, list[tuple[str, float]]] = {}
        # poi id -> (path node id, length)
        self.access: dict[str, tuple[str, float]] = {}
        self.static_edges: list[Edge] = []
        self.objects_at: dict[str, set[str]] = {}
        self.occupancy: dict[str, Counter] = {}
        self.depot_id: str | None = None
        self._frozen = False

    # -- static construction -------------------------------------------------

    def add_path_node(self, node: PathNode):
        self._check_mutable_static()
        self._check_fresh_id(node.id)
        self.path_nodes[node.id] = node
        self.adjacency[node.id] = []
        self.objects_at[node.id] = set()
        self.occupancy[node.id] = Counter()

    def add_poi_node(self, node: PoiNode):
        self._check_mutable_static()
        self._check_fresh_id(node.id)
        self.poi_nodes[node.id] = node
        if node.is_depot:
            if self.depot_id is not None:
                raise DuplicateId(f"second depot {node.id!r} (have {self.depot_id!r})")
            self.depot_id = node.id

    def add_adjacency_edge(self, u: str, v: str, length: float, directed: bool = False):
        self._check_mutable_static()
        if u not in self.path_nodes or v not in self.path_nodes:
            raise UnknownId(f"adjacency edge {u!r}-{v!r} references unknown path node")
        if length <= 0:
            raise ValueError(f"edge {u!r}-{v!r} has non-positive length")
        self.adjacency[u].append((v, length))
        if not directed:
            self.adjacency[v].append((u, length))
        self.static_edges.append(Edge(EDGE_ADJACENCY, u, v, directed, length))

    def add_access_edge(self, poi_id: str, path_id: str, length: float):
        self._check_mutable_static()
        if poi_id not in self.poi_nodes or path_id not in self.path_nodes:
            raise UnknownId(f"access edge {poi_id!r}-{path_id!r} references unknown node")
        if poi_id in self.access:
            raise DuplicateId(f"poi {poi_id!r} already has an access edge")
        if length <= 0:
            raise ValueError(f"access edge {poi_id!r}-{path_id!r} has non-positive length")
        self.access[poi_id] = (path_id, length)
        self.static_edges.append(Edge(EDGE_ACCESS, poi_id, path_id, False, length))

    def freeze_static(self):
        """Lock the static subgraph; only objects may change afterwards."""
        self._frozen = True

    def _check_mutable_static(self):
        if self._frozen:
            raise ValueError("static subgraph is immutable after freeze")

    def _check_fresh_id(self, node_id: str):
        if node_id in self.path_nodes or node_id in self.poi_nodes or node_id in self.objects:
            raise DuplicateId(f"node id {node_id!r} already in use")

    def dynamic_copy(self) -> "SceneGraph":
        """Fresh object-free graph sharing this graph's static stores.

        Replications each mutate their own copy; the static dicts are
        immutable after freeze and safe to share.
        """
        if not self._frozen:
            raise ValueError("freeze the static subgraph before copying")
        twin = SceneGraph.__new__(SceneGraph)
        twin.registry = self.registry
        twin.path_nodes = self.path_nodes
        twin.poi_nodes = self.poi_nodes
        twin.adjacency = self.adjacency
        twin.access = self.access
        twin.static_edges = self.static_edges
        twin.depot_id = self.depot_id
        twin.objects = {}
        twin.objects_at = {nid: set() for nid in self.path_nodes}
        twin.occupancy = {nid: Counter() for nid in self.path_nodes}
        twin._frozen = True
        return twin

    # -- queries --------------------------------------------------------------

    def node_position(self, node_id: str) -> tuple[float, float]:
        node = self.path_nodes.get(node_id) or self.poi_nodes.get(node_id)
        if node is None:
            obj = self.objects.get(node_id)
            if obj is None:
                raise UnknownId(node_id)
            return self.node_position(obj.attached_to)
        return (node.x, node.y)

    def free_capacity(self, path_id: str, object_class: str) -> int:
        node = self.path_nodes[path_id]
        return node.capacity.get(object_class, 0) - self.occupancy[path_id][object_class]

    def footprint_sum(self, path_id: str) -> float:
        return sum(self.objects[oid].footprint_area for oid in self.objects_at[path_id])

    def static_hash(self) -> str:
        """Stable digest of the static subgraph (nodes + edges, sorted)."""
        h = hashlib.sha256()
        for nid in sorted(self.path_nodes):
            node = self.path_nodes[nid]
            # canonicalize the capacity mapping: dict repr is insertion-ordered
            node = replace(node, capacity={k: node.capacity[k]
                                           for k in sorted(node.capacity)})
            h.update(repr(node).encode())
        for nid in sorted(self.poi_nodes):
            h.update(repr(self.poi_nodes[nid]).encode())
        for edge in sorted(self.static_edges, key=lambda e: (e.kind, e.u, e.v)):
            h.update(repr(edge).encode())
        return h.hexdigest()

    # -- dynamic mutation -----------------------------------------------------

    def attach_object(self, obj: ObjectNode):
        """Insert ``obj`` and its attachment edge, honoring per-class capacity."""
        if obj.id in self.objects:
            raise DuplicateId(f"object id {obj.id!r} already attached")
        self._check_fresh_id(obj.id)
        if obj.attached_to not in self.path_nodes:
            raise UnknownId(f"attachment target {obj.attached_to!r} is not a path node")
        if self.free_capacity(obj.attached_to, obj.semantic_class) <= 0:
            raise CapacityExceeded(
                f"node {obj.attached_to!r} has no free {obj.semantic_class!r} slot"
            )
        self.objects[obj.id] = obj
        self.objects_at[obj.attached_to].add(obj.id)
        self.occupancy[obj.attached_to][obj.semantic_class] += 1

    def remove_object(self, object_id: str):
        obj = self.objects.pop(object_id, None)
        if obj is None:
            raise UnknownId(f"object {object_id!r} not in graph")
        self.objects_at[obj.attached_to].discard(object_id)
        self.occupancy[obj.attached_to][obj.semantic_class] -= 1

    # -- observation ----------------------------------------------------------

    def radius_subgraph(self, center: tuple[float, float], r: float, t: float = 0.0) -> Observation:
        """Induced subgraph over nodes strictly within Euclidean distance r.

        Object positions are their attachment node's position; an edge is
        included only when both endpoints are selected.
        """
        if r < 0:
            raise ValueError("radius must be non-negative")
        cx, cy = center

        def inside(x, y):
            return math.hypot(x - cx, y - cy) < r

        path_sel = frozenset(
            nid for nid, n in self.path_nodes.items() if inside(n.x, n.y)
        )
        poi_sel = frozenset(
            nid for nid, n in self.poi_nodes.items() if inside(n.x, n.y)
        )
        objects_at = {
            nid: tuple(sorted((self.objects[oid] for oid in self.objects_at[nid]),
                              key=lambda o: o.id))
            for nid in path_sel
            if self.objects_at[nid]
        }
        edges = []
        for edge in self.static_edges:
            selected = path_sel | poi_sel
            if edge.u in selected and edge.v in selected:
                edges.append(edge)
        for nid in path_sel:
            for obj in objects_at.get(nid, ()):
                edges.append(Edge(EDGE_ATTACHMENT, obj.id, nid))
        return Observation(
            t=t,
            path_nodes=path_sel,
            poi_nodes=poi_sel,
            objects_at=objects_at,
            edges=tuple(edges),
        )


class ObservedGraph:
    """Belief graph: shared static subgraph plus independently tracked objects.

    Dynamic content changes only through :meth:`merge_observation`; the
    ``version`` counter increments on every merge so planners can detect
    belief changes cheaply.
    """

    def __init__(self, truth: SceneGraph):
        # Static stores are shared by reference; they are immutable after load.
        self.registry = truth.registry
        self.path_nodes = truth.path_nodes
        self.poi_nodes = truth.poi_nodes
        self.adjacency = truth.adjacency
        self.access = truth.access
        self.static_edges = truth.static_edges
        self.depot_id = truth.depot_id
        self.objects: dict[str, ObjectNode] = {}
        self.objects_at: dict[str, set[str]] = {nid: set() for nid in truth.path_nodes}
        self.last_observed: dict[str, float] = {}
        self.version = 0

    def node_position(self, node_id: str) -> tuple[float, float]:
        node = self.path_nodes.get(node_id) or self.poi_nodes.get(node_id)
        if node is None:
            raise UnknownId(node_id)
        return (node.x, node.y)

    def footprint_sum(self, path_id: str) -> float:
        return sum(self.objects[oid].footprint_area for oid in self.objects_at[path_id])

    def merge_observation(self, obs: Observation, t: float):
        """Replace believed object sets at every observed path node.

        Replacement is wholesale: stale objects vanish, newly seen ones
        appear, nodes outside the observation are untouched.  The version
        counter only advances when object content actually changed, so
        planners can skip replanning after no-op merges.
        """
        for nid in obs.path_nodes:
            if nid not in self.path_nodes:
                raise UnknownStaticNode(f"observation covers unknown node {nid!r}")
        changed = False
        for nid in obs.path_nodes:
            seen = {obj.id for obj in obs.objects_at.get(nid, ())}
            if seen != self.objects_at[nid]:
                changed = True
                for oid in self.objects_at[nid]:
                    del self.objects[oid]
                self.objects_at[nid] = set()
                for obj in obs.objects_at.get(nid, ()):
                    self.objects[obj.id] = obj
                    self.objects_at[nid].add(obj.id)
            self.last_observed[nid] = t
        if changed:
            self.version += 1


def up_to_date(belief: ObservedGraph, truth: SceneGraph, node_id: str) -> bool:
    """True iff the believed object id set at ``node_id`` matches the truth."""
    if node_id not in truth.path_nodes:
        raise UnknownId(node_id)
    return belief.objects_at[node_id] == truth.objects_at[node_id]
