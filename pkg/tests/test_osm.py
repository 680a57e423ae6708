"""OpenStreetMap import: golden micro-extracts with hand-computed geometry."""

import math

import pytest

from scenesim.errors import EmptyNetwork, MalformedXml, NoDepotCandidate
from scenesim.osm import EARTH_RADIUS_M, ImportParams, import_osm
from scenesim.scenario import load_scenario, save_scenario

DEG_PER_M = math.degrees(1.0 / EARTH_RADIUS_M)  # at the equator


def tag_xml(tags):
    return "".join(f'<tag k="{k}" v="{v}"/>' for k, v in tags.items())


def osm_xml(nodes, ways):
    """Build a tiny extract; node positions are meters from (lon=0, lat=0)."""
    parts = ['<?xml version="1.0"?><osm version="0.6">']
    for nid, (x, y, *rest) in nodes.items():
        tags = rest[0] if rest else {}
        parts.append(
            f'<node id="{nid}" lon="{x * DEG_PER_M:.12f}" '
            f'lat="{y * DEG_PER_M:.12f}">{tag_xml(tags)}</node>'
        )
    for wid, (refs, tags) in ways.items():
        nds = "".join(f'<nd ref="{r}"/>' for r in refs)
        parts.append(f'<way id="{wid}">{nds}{tag_xml(tags)}</way>')
    parts.append("</osm>")
    return "".join(parts)


def write(tmp_path, text, name="extract.osm"):
    path = tmp_path / name
    path.write_text(text)
    return path


def golden_extract():
    """A 50 m footway plus one house outline a few meters south of it."""
    nodes = {
        1: (0.0, 0.0),
        2: (50.0, 0.0),
        3: (18.0, -4.0),
        4: (28.0, -4.0),
        5: (28.0, -8.0),
        6: (18.0, -8.0),
    }
    ways = {
        10: ([1, 2], {"highway": "footway"}),
        20: ([3, 4, 5, 6, 3], {"building": "house"}),
    }
    return osm_xml(nodes, ways)


class TestGoldenFootway:
    @pytest.fixture()
    def graph(self, tmp_path):
        path = write(tmp_path, golden_extract())
        return import_osm(path, center=(0.0, 0.0), radius=200.0,
                          params=ImportParams(max_segment=20.0))

    def test_segment_interpolation(self, graph):
        # 50 m at max 20 m per piece -> 3 pieces, 2 interpolated nodes
        assert sorted(graph.path_nodes) == ["n1", "n2", "w10s0i1", "w10s0i2"]
        lengths = sorted(l for nbrs in graph.adjacency.values()
                         for _, l in nbrs)
        assert len(lengths) == 6  # 3 undirected segments
        assert all(l == pytest.approx(50.0 / 3.0, rel=1e-6) for l in lengths)

    def test_interpolated_positions(self, graph):
        x, y = graph.node_position("w10s0i1")
        assert (x, y) == (pytest.approx(50.0 / 3.0, rel=1e-6),
                          pytest.approx(0.0, abs=1e-6))

    def test_poi_from_building_centroid(self, graph):
        assert sorted(graph.poi_nodes) == ["p20"]
        poi = graph.poi_nodes["p20"]
        assert poi.semantic_class == "housing"
        assert poi.x == pytest.approx(23.0, rel=1e-6)
        assert poi.y == pytest.approx(-6.0, rel=1e-6)

    def test_depot_is_only_candidate(self, graph):
        assert graph.depot_id == "p20"
        assert graph.poi_nodes["p20"].is_depot

    def test_access_edge_to_nearest_path_node(self, graph):
        node, length = graph.access["p20"]
        assert node == "w10s0i1"
        expected = math.hypot(23.0 - 50.0 / 3.0, 6.0)
        assert length == pytest.approx(expected, rel=1e-6)

    def test_sidewalk_geometry_and_capacity(self, graph):
        node = graph.path_nodes["n1"]
        assert node.semantic_class == "sidewalk"
        assert node.sidewalk_width == 2.0
        assert node.capacity == {"car": 2, "bicycle": 4, "trashcan": 1}
        # incident-mean segment length: n1 touches one 16.67 m segment
        assert node.segment_length == pytest.approx(50.0 / 3.0, rel=1e-6)


class TestFiltersAndPruning:
    def test_building_outside_radius_leaves_no_depot(self, tmp_path):
        nodes = {
            1: (0.0, 0.0), 2: (30.0, 0.0),
            3: (400.0, 0.0, {"building": "house"}),
        }
        ways = {10: ([1, 2], {"highway": "footway"})}
        path = write(tmp_path, osm_xml(nodes, ways))
        with pytest.raises(NoDepotCandidate):
            import_osm(path, center=(0.0, 0.0), radius=100.0)

    def test_largest_component_kept(self, tmp_path):
        nodes = {i: (float(10 * i), 0.0) for i in range(1, 5)}
        nodes.update({8: (0.0, 50.0), 9: (10.0, 50.0)})
        nodes[100] = (5.0, 5.0, {"building": "house"})
        ways = {
            10: ([1, 2, 3, 4], {"highway": "footway"}),
            11: ([8, 9], {"highway": "footway"}),
        }
        path = write(tmp_path, osm_xml(nodes, ways))
        graph = import_osm(path, center=(0.0, 0.0), radius=200.0)
        assert sorted(graph.path_nodes) == ["n1", "n2", "n3", "n4"]

    def test_non_pedestrian_ways_excluded(self, tmp_path):
        nodes = {1: (0.0, 0.0), 2: (20.0, 0.0), 3: (0.0, 10.0), 4: (20.0, 10.0),
                 100: (5.0, 5.0, {"building": "house"})}
        ways = {
            10: ([1, 2], {"highway": "residential", "sidewalk": "both"}),
            11: ([3, 4], {"highway": "motorway"}),
        }
        path = write(tmp_path, osm_xml(nodes, ways))
        graph = import_osm(path, center=(0.0, 0.0), radius=200.0)
        assert sorted(graph.path_nodes) == ["n1", "n2"]

    def test_sidewalk_no_is_excluded(self, tmp_path):
        nodes = {1: (0.0, 0.0), 2: (20.0, 0.0)}
        ways = {10: ([1, 2], {"highway": "residential", "sidewalk": "no"})}
        path = write(tmp_path, osm_xml(nodes, ways))
        with pytest.raises(EmptyNetwork):
            import_osm(path, center=(0.0, 0.0), radius=200.0)

    def test_amenity_beats_building_tag(self, tmp_path):
        nodes = {1: (0.0, 0.0), 2: (20.0, 0.0),
                 100: (5.0, 5.0, {"amenity": "school", "building": "house"})}
        ways = {10: ([1, 2], {"highway": "footway"})}
        path = write(tmp_path, osm_xml(nodes, ways))
        graph = import_osm(path, center=(0.0, 0.0), radius=200.0)
        assert graph.poi_nodes["p100"].semantic_class == "education"


class TestStability:
    def test_import_is_deterministic(self, tmp_path):
        path = write(tmp_path, golden_extract())
        a = import_osm(path, center=(0.0, 0.0), radius=200.0)
        b = import_osm(path, center=(0.0, 0.0), radius=200.0)
        assert a.static_hash() == b.static_hash()

    def test_round_trip_through_scenario_file(self, tmp_path):
        src = write(tmp_path, golden_extract())
        graph = import_osm(src, center=(0.0, 0.0), radius=200.0)
        out = tmp_path / "scenario.json"
        save_scenario(graph, out)
        loaded = load_scenario(out)
        assert loaded.static_hash() == graph.static_hash()

    def test_malformed_xml(self, tmp_path):
        path = write(tmp_path, "<osm><node id=1></osm>")
        with pytest.raises(MalformedXml):
            import_osm(path, center=(0.0, 0.0), radius=100.0)
