import pytest

from scenesim.graph import PathNode, PoiNode, SceneGraph
from scenesim.synthetic import line_scenario


@pytest.fixture
def tiny_graph():
    """Three-node line at x = 0, 10, 20 with a depot and one housing PoI."""
    return line_scenario(
        3, spacing=10.0, capacity={"car": 1, "bicycle": 3, "trashcan": 1},
        pois=((2, "housing"),),
    )


def build_line(n, capacity=None, pois=(), **kwargs):
    return line_scenario(n, capacity=capacity, pois=pois, **kwargs)
