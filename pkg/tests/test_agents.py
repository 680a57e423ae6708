"""Travel-cost model, planner optimality, observation, task assignment."""

import math

import networkx as nx
import pytest

from scenesim.agents import (
    Agent,
    PLANNER_OBSERVED,
    PLANNER_STATIC,
    node_penalty,
    node_velocity,
    observe,
    plan_path,
)
from scenesim.errors import InvalidGeometry, Unreachable
from scenesim.graph import ObjectNode, ObservedGraph, PathNode, SceneGraph
from scenesim.routing import astar
from scenesim.stochastic import RandomStream
from scenesim.synthetic import line_scenario


def make_agent(node="v0", velocity=1.0, width=0.5, radius=20.0):
    return Agent(id="a0", current_node=node, default_velocity=velocity,
                 width=width, sensor_radius=radius)


def pnode(l_s=10.0, b_s=2.0):
    return PathNode(id="n", x=0, y=0, semantic_class="sidewalk",
                    capacity={}, segment_length=l_s, sidewalk_width=b_s)


class TestPenalty:
    def test_empty_node_is_free(self):
        assert node_penalty(pnode(), 0.0, 0.5, 1.0) == 0.0

    def test_worked_example(self):
        # A_free = 10 * (2 - 0.5) = 15 m^2; half occupied -> velocity halves,
        # so the node costs 10/0.5 - 10/1 = 10 extra seconds
        assert node_velocity(pnode(), 7.5, 0.5, 1.0) == pytest.approx(0.5)
        assert node_penalty(pnode(), 7.5, 0.5, 1.0) == pytest.approx(10.0)

    def test_saturated_node_blocks(self):
        assert node_velocity(pnode(), 15.0, 0.5, 1.0) == 0.0
        assert node_penalty(pnode(), 15.0, 0.5, 1.0) == math.inf
        assert node_penalty(pnode(), 20.0, 0.5, 1.0) == math.inf

    def test_monotone_in_footprint(self):
        penalties = [node_penalty(pnode(), a, 0.5, 1.0) for a in (0.0, 3.0, 7.5, 12.0)]
        assert penalties == sorted(penalties)

    def test_wide_agent_rejected(self):
        with pytest.raises(InvalidGeometry):
            node_penalty(pnode(b_s=2.0), 0.0, 2.0, 1.0)


def add_object(graph, oid, node, area=1.0, cls="car"):
    graph.attach_object(ObjectNode(id=oid, semantic_class=cls, t_spawn=0.0,
                                   t_lifetime=1.0, footprint_area=area,
                                   attached_to=node))


class TestPlanPath:
    def test_obstacle_free_matches_shortest_distance(self):
        graph = line_scenario(5)
        agent = make_agent()
        path, _ = plan_path(graph, "v0", "v4", agent, PLANNER_STATIC)
        assert path == ["v0", "v1", "v2", "v3", "v4"]

    def test_penalized_route_avoided(self):
        # two routes between ends: direct 100 m vs detour 120 m, v = 1 m/s;
        # a believed 30 s penalty on the direct route's midpoint flips the choice
        graph = SceneGraph()
        coords = {
            "a": (0, 0), "m": (50, 0), "b": (100, 0),
            "d1": (40, 30), "d2": (80, 30),
        }
        for nid, (x, y) in coords.items():
            graph.add_path_node(PathNode(nid, x, y, "sidewalk",
                                         {"car": 5}, 10.0, 2.0))
        graph.add_adjacency_edge("a", "m", 50.0)
        graph.add_adjacency_edge("m", "b", 50.0)
        graph.add_adjacency_edge("a", "d1", 40.0)
        graph.add_adjacency_edge("d1", "d2", 40.0)
        graph.add_adjacency_edge("d2", "b", 40.0)
        graph.freeze_static()
        agent = make_agent(node="a")
        belief = ObservedGraph(graph)

        path, _ = plan_path(belief, "a", "b", agent, PLANNER_OBSERVED)
        assert path == ["a", "m", "b"]

        # ~30 s penalty at m: free area 15 m^2, 11.25 m^2 occupied -> nu=0.25
        add_object(graph, "o1", "m", area=11.25)
        belief.merge_observation(graph.radius_subgraph((50, 0), 1.0), 0.0)
        path, _ = plan_path(belief, "a", "b", agent, PLANNER_OBSERVED)
        assert path == ["a", "d1", "d2", "b"]

    def test_blocked_node_excluded(self):
        graph = line_scenario(3, capacity={"car": 9})
        add_object(graph, "o1", "v1", area=100.0)  # saturates the 15 m^2 free area
        belief = ObservedGraph(graph)
        belief.merge_observation(graph.radius_subgraph((10, 0), 1.0), 0.0)
        with pytest.raises(Unreachable):
            plan_path(belief, "v0", "v2", make_agent(), PLANNER_OBSERVED)

    def test_poi_endpoints_resolve_via_access_edge(self):
        graph = line_scenario(4, pois=((3, "housing"),))
        path, _ = plan_path(graph, "depot", "poi0", make_agent(), PLANNER_STATIC)
        assert path[0] == "v0" and path[-1] == "v3"

    def test_static_ignores_objects(self):
        graph = line_scenario(3, capacity={"car": 9})
        add_object(graph, "o1", "v1", area=100.0)
        path, cost = plan_path(graph, "v0", "v2", make_agent(), PLANNER_STATIC)
        assert path == ["v0", "v1", "v2"]
        # 2 edges of 10 m plus 2 entered nodes of 10 m segment at 1 m/s
        assert cost == pytest.approx(40.0)

    def test_path_edges_are_adjacent(self):
        graph = line_scenario(6)
        path, _ = plan_path(graph, "v0", "v5", make_agent(), PLANNER_STATIC)
        for u, v in zip(path, path[1:]):
            assert any(n == v for n, _ in graph.adjacency[u])


class TestAstarOracle:
    @pytest.mark.parametrize("seed", range(20))
    def test_random_graphs_match_networkx_dijkstra(self, seed):
        rng = RandomStream(seed, "astar-oracle")
        n = 5 + int(rng.uniform() * 45)
        positions = {f"q{i:02d}": (rng.uniform() * 200, rng.uniform() * 200)
                     for i in range(n)}
        nodes = sorted(positions)
        adjacency = {nid: [] for nid in nodes}
        G = nx.DiGraph()
        penalties = {nid: (math.inf if rng.uniform() < 0.05 else rng.uniform() * 30)
                     for nid in nodes}
        # random connected-ish graph: chain plus random chords; edge length
        # >= straight-line distance keeps the heuristic admissible
        edges = [(nodes[i], nodes[i + 1]) for i in range(n - 1)]
        edges += [
            (nodes[int(rng.uniform() * n)], nodes[int(rng.uniform() * n)])
            for _ in range(2 * n)
        ]
        for u, v in edges:
            if u == v:
                continue
            dist = math.dist(positions[u], positions[v])
            length = dist * (1.0 + rng.uniform())
            adjacency[u].append((v, length))
            adjacency[v].append((u, length))
            for a, b in ((u, v), (v, u)):
                w = length + penalties[b]
                if not math.isinf(w) and (not G.has_edge(a, b) or G[a][b]["weight"] > w):
                    G.add_edge(a, b, weight=w)

        def node_cost(nid):
            return penalties[nid]

        src, dst = nodes[0], nodes[-1]
        try:
            expected = nx.dijkstra_path_length(G, src, dst)
            reachable = True
        except (nx.NetworkXNoPath, nx.NodeNotFound):
            reachable = False
        if reachable:
            _, cost = astar(adjacency, positions.__getitem__, src, dst, 1.0, node_cost)
            assert cost == pytest.approx(expected, abs=1e-9)
        else:
            with pytest.raises(Unreachable):
                astar(adjacency, positions.__getitem__, src, dst, 1.0, node_cost)


class TestObserve:
    def test_zero_radius_sees_nothing(self):
        graph = line_scenario(3)
        agent = make_agent(radius=0.0)
        obs = observe(graph, agent, 0.0)
        assert not obs.path_nodes

    def test_object_at_own_node_observed(self):
        graph = line_scenario(3)
        add_object(graph, "o1", "v0")
        obs = observe(graph, make_agent(radius=5.0), 0.0)
        assert [o.id for o in obs.objects_at["v0"]] == ["o1"]

    def test_object_beyond_range_not_observed(self):
        graph = line_scenario(5)
        add_object(graph, "o1", "v4")  # 40 m away, radius 20
        obs = observe(graph, make_agent(radius=20.0), 0.0)
        assert "v4" not in obs.objects_at and "v4" not in obs.path_nodes
