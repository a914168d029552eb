"""Problem representation and exact fire-spread evaluation of allocations.

Fire spread is modeled as shortest paths from an ignition vertex over
positive arc travel times (minutes).  Protecting a vertex adds a delay to
all of its outgoing arcs.  A vertex burns at time t if its fire arrival
time is strictly below t.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field

INF = math.inf


class StructuralError(ValueError):
    """Malformed instance, graph, or allocation data."""


@dataclass(frozen=True)
class DirectedGraph:
    """Directed graph with positive arc travel times in minutes.

    Arcs are stored as (tail, head, travel_time) tuples, at most one per
    ordered vertex pair, no self-loops.
    """

    vertex_count: int
    arcs: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        seen = set()
        for tail, head, time in self.arcs:
            if not (0 <= tail < self.vertex_count and 0 <= head < self.vertex_count):
                raise StructuralError(f"arc ({tail},{head}) has vertex id out of range")
            if tail == head:
                raise StructuralError(f"self-loop at vertex {tail}")
            if (tail, head) in seen:
                raise StructuralError(f"duplicate arc ({tail},{head})")
            if not time > 0:
                raise StructuralError(f"arc ({tail},{head}) has nonpositive travel time {time}")
            seen.add((tail, head))

    def adjacency(self) -> list[list[tuple[int, float]]]:
        """Out-adjacency lists: adj[u] = [(v, t_uv), ...]."""
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.vertex_count)]
        for tail, head, time in self.arcs:
            adj[tail].append((head, time))
        return adj

    def in_adjacency(self) -> list[list[tuple[int, float]]]:
        """In-adjacency lists: inadj[v] = [(u, t_uv), ...]."""
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.vertex_count)]
        for tail, head, time in self.arcs:
            adj[head].append((tail, time))
        return adj

    def arc_time(self, tail: int, head: int) -> float:
        for t, h, time in self.arcs:
            if t == tail and h == head:
                return time
        raise StructuralError(f"arc ({tail},{head}) does not exist")


@dataclass(frozen=True)
class WspInstance:
    """A wildfire suppression problem instance.

    schedule is a list of (release_time, count) pairs with strictly
    increasing release times in (0, horizon].  Resource ids 0..k-1 are
    assigned to release points in order: the first count_1 resources
    belong to the first release time, and so on.
    """

    graph: DirectedGraph
    ignition: int
    horizon: float
    delay: float
    schedule: tuple[tuple[float, int], ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (0 <= self.ignition < self.graph.vertex_count):
            raise StructuralError(f"ignition vertex {self.ignition} out of range")
        if not self.horizon > 0:
            raise StructuralError("horizon must be positive")
        if self.delay < 0:
            raise StructuralError("delay must be nonnegative")
        prev = 0.0
        for t, count in self.schedule:
            if not (0 < t <= self.horizon):
                raise StructuralError(f"release time {t} outside (0, horizon]")
            if t <= prev and prev > 0:
                raise StructuralError("release times must be strictly increasing")
            if count < 1:
                raise StructuralError(f"release count {count} must be >= 1")
            prev = t

    @property
    def total_resources(self) -> int:
        return sum(count for _, count in self.schedule)

    def release_times(self) -> list[float]:
        return [t for t, _ in self.schedule]

    def resource_release_time(self, resource: int) -> float:
        """Release time of resource id (0-based)."""
        if resource < 0:
            raise StructuralError(f"invalid resource id {resource}")
        offset = 0
        for t, count in self.schedule:
            if resource < offset + count:
                return t
            offset += count
        raise StructuralError(f"resource id {resource} beyond schedule total {offset}")

    def release_point_of(self, resource: int) -> int:
        """Index of the release point (0-based) a resource belongs to."""
        offset = 0
        for i, (_, count) in enumerate(self.schedule):
            if resource < offset + count:
                return i
            offset += count
        raise StructuralError(f"resource id {resource} beyond schedule total {offset}")


@dataclass(frozen=True)
class Allocation:
    """Injective partial map from resource ids to protected vertex ids."""

    assignments: tuple[tuple[int, int], ...]

    def __post_init__(self):
        resources = [r for r, _ in self.assignments]
        vertices = [v for _, v in self.assignments]
        if len(set(resources)) != len(resources):
            raise StructuralError("a resource appears twice in the allocation")
        if len(set(vertices)) != len(vertices):
            raise StructuralError("a vertex is protected twice")

    @property
    def protected(self) -> frozenset[int]:
        return frozenset(v for _, v in self.assignments)

    def extended(self, pairs) -> "Allocation":
        return Allocation(self.assignments + tuple(pairs))


EMPTY_ALLOCATION = Allocation(())


@dataclass(frozen=True)
class FireOutcome:
    """Fire arrival time per vertex; +inf marks unreachable vertices."""

    arrival: tuple[float, ...]

    def burned_set(self, t: float) -> set[int]:
        """Vertices with arrival strictly below t (burned at time t)."""
        if t < 0:
            raise ValueError("time must be nonnegative")
        return {v for v, a in enumerate(self.arrival) if a < t}

    def burned_count(self, t: float) -> int:
        return sum(1 for a in self.arrival if a < t)


def compute_arrival_times(
    instance: WspInstance,
    alloc: Allocation = EMPTY_ALLOCATION,
    vertex_delays: list[float] | None = None,
) -> FireOutcome:
    """Shortest-path fire arrival times under an allocation.

    The cost of arc (u, v) is t_uv plus the delay if u is protected.  The
    delay is the instance's uniform value unless vertex_delays overrides
    it per vertex (used by the heterogeneous-delay problem variant).
    """
    n = instance.graph.vertex_count
    protected = alloc.protected
    for v in protected:
        if not (0 <= v < n):
            raise StructuralError(f"protected vertex {v} out of range")
    if vertex_delays is not None and len(vertex_delays) != n:
        raise StructuralError("vertex delay vector length mismatch")

    adj = instance.graph.adjacency()
    dist = [INF] * n
    dist[instance.ignition] = 0.0
    heap = [(0.0, instance.ignition)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if u in protected:
            extra = vertex_delays[u] if vertex_delays is not None else instance.delay
        else:
            extra = 0.0
        for v, t in adj[u]:
            nd = d + t + extra
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return FireOutcome(tuple(dist))


def single_source_distances(graph: DirectedGraph, source: int) -> list[float]:
    """Plain shortest-path distances from source; +inf if unreachable."""
    adj = graph.adjacency()
    dist = [INF] * graph.vertex_count
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, t in adj[u]:
            nd = d + t
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def burned_set(outcome: FireOutcome, t: float) -> set[int]:
    return outcome.burned_set(t)


def objective(instance: WspInstance, alloc: Allocation = EMPTY_ALLOCATION) -> int:
    """Number of vertices burned before the horizon under the allocation."""
    outcome = compute_arrival_times(instance, alloc)
    return outcome.burned_count(instance.horizon)


def effective_travel_time(instance: WspInstance, alloc: Allocation, tail: int, head: int) -> float:
    """Arc travel time including the suppression delay on protected tails."""
    t = instance.graph.arc_time(tail, head)
    if tail in alloc.protected:
        return t + instance.delay
    return t


@dataclass(frozen=True)
class Violation:
    resource: int | None
    vertex: int | None
    reason: str


def check_feasibility(instance: WspInstance, alloc: Allocation) -> list[Violation]:
    """Feasibility of an allocation; an empty list means feasible.

    A resource may only protect a vertex whose arrival time, under the
    full allocation, is at least the resource's release time.  Ties
    (arrival exactly equal to the release time) are allowed.
    """
    violations: list[Violation] = []
    n = instance.graph.vertex_count
    k = instance.total_resources
    for resource, vertex in alloc.assignments:
        if not (0 <= vertex < n):
            violations.append(Violation(resource, vertex, "vertex id out of range"))
        if not (0 <= resource < k):
            violations.append(Violation(resource, vertex, "resource id not in schedule"))
    if violations:
        return violations

    outcome = compute_arrival_times(instance, alloc)
    for resource, vertex in alloc.assignments:
        release = instance.resource_release_time(resource)
        if outcome.arrival[vertex] < release:
            violations.append(
                Violation(
                    resource,
                    vertex,
                    f"vertex burns at {outcome.arrival[vertex]:g} before release {release:g}",
                )
            )
    return violations


# ---------------------------------------------------------------------------
# Instance / solution files


def _canonical_arcs(graph: DirectedGraph) -> list[list]:
    return [[t, h, w] for t, h, w in sorted(graph.arcs)]


def instance_to_json(instance: WspInstance) -> str:
    """Serialize an instance to canonical, byte-stable JSON text."""
    from wsptools import INSTANCE_FORMAT_VERSION

    doc = {
        "version": INSTANCE_FORMAT_VERSION,
        "vertex_count": instance.graph.vertex_count,
        "ignition": instance.ignition,
        "horizon_min": instance.horizon,
        "delay_min": instance.delay,
        "schedule": [{"t_min": t, "count": c} for t, c in instance.schedule],
        "arcs": _canonical_arcs(instance.graph),
        "meta": instance.meta,
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def instance_from_json(text: str) -> WspInstance:
    doc = json.loads(text)
    graph = DirectedGraph(
        vertex_count=doc["vertex_count"],
        arcs=tuple((a[0], a[1], float(a[2])) for a in doc["arcs"]),
    )
    return WspInstance(
        graph=graph,
        ignition=doc["ignition"],
        horizon=float(doc["horizon_min"]),
        delay=float(doc["delay_min"]),
        schedule=tuple((float(e["t_min"]), int(e["count"])) for e in doc["schedule"]),
        meta=doc.get("meta", {}),
    )


def save_instance(instance: WspInstance, path) -> None:
    with open(path, "w") as f:
        f.write(instance_to_json(instance))


def load_instance(path) -> WspInstance:
    with open(path) as f:
        return instance_from_json(f.read())


def solution_to_json(instance_id: str, alloc: Allocation, objective_value: int) -> str:
    doc = {
        "instance_id": instance_id,
        "assignments": [[r, v] for r, v in sorted(alloc.assignments)],
        "objective": objective_value,
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def solution_from_json(text: str) -> tuple[str, Allocation, int]:
    doc = json.loads(text)
    alloc = Allocation(tuple((int(r), int(v)) for r, v in doc["assignments"]))
    return doc["instance_id"], alloc, int(doc["objective"])
