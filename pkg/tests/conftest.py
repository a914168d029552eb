import numpy as np
import pytest

from wsptools.core import DirectedGraph, WspInstance


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def nine_vertex_instance() -> WspInstance:
    """Hand-encoded nine-vertex example: ignition s = 0, vertices v1..v8
    = 1..8, three resources released at 2, 3, 4, delay 2, horizon 5.

    Free-burn arrivals: v1 = v3 = 1; protecting {v2, v4, v6} keeps
    v5, v7, v8 unburned at the horizon, leaving six burned vertices.
    """
    arcs = (
        (0, 1, 1.0),
        (0, 3, 1.0),
        (1, 2, 1.0),
        (1, 4, 2.0),
        (3, 4, 2.0),
        (3, 6, 3.0),
        (2, 5, 1.0),
        (4, 5, 1.0),
        (4, 7, 1.0),
        (6, 7, 1.0),
        (5, 8, 1.0),
        (7, 8, 1.0),
    )
    graph = DirectedGraph(vertex_count=9, arcs=arcs)
    return WspInstance(
        graph=graph,
        ignition=0,
        horizon=5.0,
        delay=2.0,
        schedule=((2.0, 1), (3.0, 1), (4.0, 1)),
    )


@pytest.fixture
def figure_instance():
    return nine_vertex_instance()
