"""Random instance builders for verification and testing.

Shared by the reduction-verification command and the test suite so both
exercise the same distribution of small instances.
"""

from __future__ import annotations

import numpy as np

from wsptools.core import Allocation, DirectedGraph, WspInstance
from wsptools.reductions import MvnpInstance


def random_digraph(rng: np.random.Generator, max_vertices: int = 60, arc_prob: float = 0.3,
                   max_cost: float = 10.0, integer_costs: bool = False) -> DirectedGraph:
    n = int(rng.integers(2, max_vertices + 1))
    arcs = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < arc_prob:
                if integer_costs:
                    cost = float(rng.integers(1, int(max_cost) + 1))
                else:
                    cost = float(rng.uniform(0.1, max_cost))
                arcs.append((u, v, cost))
    return DirectedGraph(vertex_count=n, arcs=tuple(arcs))


def random_wsp_instance(rng: np.random.Generator, max_vertices: int = 60) -> WspInstance:
    graph = random_digraph(rng, max_vertices)
    horizon = float(rng.uniform(5.0, 50.0))
    n_points = int(rng.integers(0, 4))
    times = sorted(float(t) for t in rng.uniform(0.1, horizon, size=n_points))
    times = sorted(set(times))
    schedule = tuple((t, int(rng.integers(1, 4))) for t in times)
    return WspInstance(
        graph=graph,
        ignition=int(rng.integers(0, graph.vertex_count)),
        horizon=horizon,
        delay=float(rng.uniform(0.0, horizon)),
        schedule=schedule,
    )


def random_allocation(rng: np.random.Generator, instance: WspInstance) -> Allocation:
    """Random injective assignment; not necessarily feasible."""
    k = instance.total_resources
    if k == 0:
        return Allocation(())
    n = instance.graph.vertex_count
    size = int(rng.integers(0, min(k, n) + 1))
    vertices = rng.choice(n, size=size, replace=False)
    resources = rng.choice(k, size=size, replace=False)
    return Allocation(tuple(zip(sorted(int(r) for r in resources), (int(v) for v in vertices))))


def random_grid_instance(
    rng: np.random.Generator,
    side: int = 4,
    schedule_spec=((2.0, 1), (4.0, 1)),
    horizon: float = 10.0,
    delay: float = 5.0,
) -> WspInstance:
    """Small 4-neighbor grid with random arc times, ignition at a corner."""
    arcs = []
    for y in range(side):
        for x in range(side):
            u = y * side + x
            for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if 0 <= nx < side and 0 <= ny < side:
                    arcs.append((u, ny * side + nx, float(rng.uniform(0.5, 3.0))))
    graph = DirectedGraph(vertex_count=side * side, arcs=tuple(arcs))
    return WspInstance(graph=graph, ignition=0, horizon=horizon, delay=delay,
                       schedule=tuple(schedule_spec))


def random_mvnp_instance(
    rng: np.random.Generator,
    max_vertices: int = 7,
    max_k: int = 2,
    max_cost: int = 5,
) -> MvnpInstance:
    """Small interdiction instance with integer costs and a guaranteed
    source-to-sink arc set (the sink may still be unreachable)."""
    while True:
        graph = random_digraph(
            rng, max_vertices=max_vertices, arc_prob=0.4, max_cost=max_cost, integer_costs=True
        )
        n = graph.vertex_count
        if n < 3:
            continue
        source, sink = 0, n - 1
        # the timed reduction needs an arc out of the source that survives
        # sink removal
        if not any(u == source and v != sink for u, v, _ in graph.arcs):
            continue
        k = int(rng.integers(0, max_k + 1))
        h = float(rng.integers(1, 3 * max_cost))
        return MvnpInstance(graph=graph, source=source, sink=sink, k=k, h=h)
