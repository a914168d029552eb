"""Seeded generation of suppression instances on n x n grid landscapes.

A landscape is an n x n grid of square cells covering roughly
N_xy x N_xy square feet.  Gradient noise fields drive terrain heights,
base spread rates, and a symmetric per-edge wind field; the physics
module turns these into directional arc travel times.  The horizon,
delay, and resource schedule are derived from the free-burn arrival
times so that instances are neither trivially small nor dominated by
unburnable vertices.

Generation is a pure function of the configuration (including the seed):
serialized instances are byte-stable across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from wsptools import __version__
from wsptools.core import (
    DirectedGraph,
    WspInstance,
    single_source_distances,
)
from wsptools.noise import gradient_noise, _mix_seed
from wsptools.rothermel import (
    DEFAULT_CONSTANTS,
    DEFAULT_PARAMS,
    FuelConstants,
    SpreadParams,
    rate_of_spread,
    travel_time,
)


class GenerationError(RuntimeError):
    """The configuration cannot produce a valid instance."""


# Noise channels, one independent field per landscape attribute.
CHANNEL_TERRAIN = 0
CHANNEL_WIND_ANGLE = 1
CHANNEL_WIND_SPEED = 2
CHANNEL_BASE_ROS = 3

# Lattice cells per noise period; gives a handful of terrain features
# per landscape at the supported grid sizes.
NOISE_PERIOD_CELLS = 8.0

GRID_LEVELS = {"small": 20, "medium": 30, "large": 40, "huge": 80}
SLOPE_LEVELS = {"flat": 10.0, "moderate": 20.0, "steep": 40.0}  # degrees
WIND_LEVELS = {  # midflame wind speed interval, ft/min
    "light": (94.5, 195.0),
    "moderate": (324.9, 466.5),
    "strong": (637.8, 815.1),
}
DECISION_LEVELS = {"few": 5, "moderate": 10, "many": 20}
RESOURCE_LEVELS = {"few": lambda n: n // 2, "moderate": lambda n: n, "many": lambda n: 2 * n}
DELAY_LEVELS = {"low": lambda h: h / 3.0, "medium": lambda h: h / 2.0, "high": lambda h: h}
FIRST_RELEASE_LEVELS = {"early": 5.0, "late": 10.0, "very_late": 20.0}  # burn percentiles
LAST_RELEASE_LEVELS = {"very_early": 60.0, "early": 70.0, "late": 80.0, "very_late": 95.0}

BASE_ROS_RANGE = (1.0, 15.0)  # ft/min
MAX_SLOPE_TANGENT = 1.0  # tan(45 degrees)
WIND_ANGLE_SPREAD = math.pi / 6.0

HOURS_24 = 1440.0  # minutes
HOURS_48 = 2880.0

STANDARD_GRID_SIZES = frozenset(GRID_LEVELS.values())


@dataclass(frozen=True)
class GeneratorConfig:
    """Factor levels, seed, and landscape extent for one instance."""

    seed: int = 0
    n: int = 30
    landscape_extent: float = 26240.0  # N_xy, feet
    slope_level: str = "moderate"
    wind_level: str = "light"
    wind_direction: float = 0.0  # radians, 0 = +x
    decision_points: int = 10
    resources_level: str = "moderate"
    delay_level: str = "high"
    first_release: str = "early"
    last_release: str = "very_late"
    constants: FuelConstants = DEFAULT_CONSTANTS
    params: SpreadParams = DEFAULT_PARAMS

    def __post_init__(self):
        if self.n < 2:
            raise GenerationError("grid side must be at least 2")
        for name, value, table in [
            ("slope_level", self.slope_level, SLOPE_LEVELS),
            ("wind_level", self.wind_level, WIND_LEVELS),
            ("resources_level", self.resources_level, RESOURCE_LEVELS),
            ("delay_level", self.delay_level, DELAY_LEVELS),
            ("first_release", self.first_release, FIRST_RELEASE_LEVELS),
            ("last_release", self.last_release, LAST_RELEASE_LEVELS),
        ]:
            if value not in table:
                raise GenerationError(f"unknown {name} {value!r}; choose from {sorted(table)}")
        if self.decision_points < 1:
            raise GenerationError("decision_points must be at least 1")

    @property
    def max_height(self) -> float:
        """N_z: maximum terrain elevation in feet."""
        return self.landscape_extent * math.tan(math.radians(SLOPE_LEVELS[self.slope_level]))

    @property
    def cell_spacing(self) -> int:
        """Planar distance between adjacent cell centers, feet."""
        return math.ceil(self.landscape_extent / self.n)

    @property
    def resource_count(self) -> int:
        return RESOURCE_LEVELS[self.resources_level](self.n)

    @property
    def ignition(self) -> int:
        c = self.n // 2
        return c * self.n + c


@dataclass(frozen=True)
class Landscape:
    """Per-vertex heights (ft) and base spread rates (ft/min), plus a
    symmetric wind vector per undirected adjacent pair."""

    heights: tuple[float, ...]
    base_ros: tuple[float, ...]
    wind_vectors: dict[tuple[int, int], tuple[float, float]] = field(compare=False)


def vertex_index(config: GeneratorConfig, x: int, y: int) -> int:
    return y * config.n + x


def grid_neighbors(n: int, x: int, y: int):
    if x > 0:
        yield x - 1, y
    if x < n - 1:
        yield x + 1, y
    if y > 0:
        yield x, y - 1
    if y < n - 1:
        yield x, y + 1


def generate_terrain(config: GeneratorConfig) -> tuple[float, ...]:
    """Vertex heights in [0, N_z] feet from the terrain noise field."""
    nz = config.max_height
    heights = []
    for y in range(config.n):
        for x in range(config.n):
            value = gradient_noise(
                config.seed, CHANNEL_TERRAIN, x / NOISE_PERIOD_CELLS, y / NOISE_PERIOD_CELLS
            )
            heights.append(nz * value)
    return tuple(heights)


def generate_base_ros(config: GeneratorConfig) -> tuple[float, ...]:
    """Per-vertex no-wind, no-slope spread rates in [1, 15] ft/min."""
    lo, hi = BASE_ROS_RANGE
    rates = []
    for y in range(config.n):
        for x in range(config.n):
            value = gradient_noise(
                config.seed, CHANNEL_BASE_ROS, x / NOISE_PERIOD_CELLS, y / NOISE_PERIOD_CELLS
            )
            rates.append(lo + (hi - lo) * value)
    return tuple(rates)


def generate_wind_field(config: GeneratorConfig) -> dict[tuple[int, int], tuple[float, float]]:
    """Wind vector per undirected adjacent pair, keyed by (min id, max id).

    The predominant direction is rotated by an angle noise in
    [-pi/6, pi/6] and scaled to a magnitude within the configured
    interval.  Both noises are evaluated at the midpoint of the two
    cells, which makes the field symmetric by construction.
    """
    lo, hi = WIND_LEVELS[config.wind_level]
    base = (math.cos(config.wind_direction), math.sin(config.wind_direction))
    field_: dict[tuple[int, int], tuple[float, float]] = {}
    n = config.n
    for y in range(n):
        for x in range(n):
            u = vertex_index(config, x, y)
            for nx, ny in grid_neighbors(n, x, y):
                v = vertex_index(config, nx, ny)
                if u > v:
                    continue
                mx = (x + nx) / 2.0 / NOISE_PERIOD_CELLS
                my = (y + ny) / 2.0 / NOISE_PERIOD_CELLS
                angle_noise = gradient_noise(config.seed, CHANNEL_WIND_ANGLE, mx, my)
                speed_noise = gradient_noise(config.seed, CHANNEL_WIND_SPEED, mx, my)
                angle = (2.0 * angle_noise - 1.0) * WIND_ANGLE_SPREAD
                speed = lo + (hi - lo) * speed_noise
                cos_a, sin_a = math.cos(angle), math.sin(angle)
                wx = speed * (cos_a * base[0] - sin_a * base[1])
                wy = speed * (sin_a * base[0] + cos_a * base[1])
                field_[(u, v)] = (wx, wy)
    return field_


def generate_landscape(config: GeneratorConfig) -> Landscape:
    return Landscape(
        heights=generate_terrain(config),
        base_ros=generate_base_ros(config),
        wind_vectors=generate_wind_field(config),
    )


def build_travel_times(config: GeneratorConfig, landscape: Landscape) -> DirectedGraph:
    """4-neighbor grid graph with directional fire travel times.

    For each ordered arc (u, v): the slope tangent comes from the height
    difference capped at 45 degrees, the wind component is the projection
    of the pair's wind vector onto the arc direction, and the travel time
    is the 3D arc length over the harmonic mean of the two directional
    spread rates.
    """
    n = config.n
    d = float(config.cell_spacing)
    arcs = []
    for y in range(n):
        for x in range(n):
            u = vertex_index(config, x, y)
            for nx, ny in grid_neighbors(n, x, y):
                v = vertex_index(config, nx, ny)
                dz = landscape.heights[v] - landscape.heights[u]
                # cap the slope angle at 45 degrees
                dz = max(-MAX_SLOPE_TANGENT * d, min(MAX_SLOPE_TANGENT * d, dz))
                slope_tan = dz / d
                direction = ((nx - x), (ny - y))  # unit vector on the grid
                wind = landscape.wind_vectors[(min(u, v), max(u, v))]
                wind_component = wind[0] * direction[0] + wind[1] * direction[1]
                r_tail = rate_of_spread(
                    landscape.base_ros[u], wind_component, slope_tan, config.params, config.constants
                )
                r_head = rate_of_spread(
                    landscape.base_ros[v], wind_component, slope_tan, config.params, config.constants
                )
                length = math.hypot(d, dz)
                arcs.append((u, v, travel_time(length, r_tail, r_head)))
    return DirectedGraph(vertex_count=n * n, arcs=tuple(arcs))


def free_burn_quantile(arrivals, p: float) -> float:
    """Largest arrival time t with at most p% of the vertices burned before t.

    Evaluated over the finite multiset of arrival values; p = 100 yields
    the maximum finite arrival time.
    """
    if not 0 < p <= 100:
        raise ValueError(f"percentile must be in (0, 100], got {p}")
    finite = sorted(a for a in arrivals if math.isfinite(a))
    if not finite:
        raise GenerationError("no vertex has a finite free-burn arrival time")
    threshold = (p / 100.0) * len(arrivals)
    best = None
    strictly_less = 0
    i = 0
    while i < len(finite):
        j = i
        while j < len(finite) and finite[j] == finite[i]:
            j += 1
        if strictly_less <= threshold:
            best = finite[i]
        strictly_less = j
        i = j
    assert best is not None  # t = min arrival always qualifies
    return best


def compute_horizon(arrivals) -> float:
    """Horizon in minutes: at least 24h, capped at 48h unless 70% of the
    vertices burn even later."""
    q100 = free_burn_quantile(arrivals, 100.0)
    q70 = free_burn_quantile(arrivals, 70.0)
    return max(min(max(q100, HOURS_24), HOURS_48), q70)


def build_resource_schedule(
    config: GeneratorConfig, horizon: float, arrivals, rng: np.random.Generator
) -> tuple[tuple[float, int], ...]:
    """Release times and counts: T points equally spaced over the release
    window, with the resources balanced across points and the quantities
    randomly permuted.  Zero-count points are dropped."""
    t = config.decision_points
    k = config.resource_count
    first = free_burn_quantile(arrivals, FIRST_RELEASE_LEVELS[config.first_release])
    last = free_burn_quantile(arrivals, LAST_RELEASE_LEVELS[config.last_release])
    last = min(last, horizon)  # release times must not exceed the horizon
    if t > 1 and not first < last:
        raise GenerationError(
            f"degenerate release window: q({FIRST_RELEASE_LEVELS[config.first_release]:g}) = "
            f"{first:g} >= q({LAST_RELEASE_LEVELS[config.last_release]:g}) clamped to {last:g}"
        )
    if t == 1:
        times = [first]
    else:
        step = (last - first) / (t - 1)
        times = [first + i * step for i in range(t - 1)] + [last]
    counts = [k // t + (1 if i + 1 <= k % t else 0) for i in range(t)]
    counts = [counts[i] for i in rng.permutation(t)]
    return tuple((times[i], counts[i]) for i in range(t) if counts[i] > 0)


def generate_instance(config: GeneratorConfig) -> WspInstance:
    """Compose all generation steps into a complete instance."""
    landscape = generate_landscape(config)
    graph = build_travel_times(config, landscape)
    arrivals = single_source_distances(graph, config.ignition)
    horizon = compute_horizon(arrivals)
    delay = DELAY_LEVELS[config.delay_level](horizon)
    rng = np.random.default_rng(_mix_seed(config.seed, 1000))
    schedule = build_resource_schedule(config, horizon, arrivals, rng)
    meta = {
        "generator": {
            "version": __version__,
            "seed": config.seed,
            "n": config.n,
            "landscape_extent_ft": config.landscape_extent,
            "cell_spacing_ft": config.cell_spacing,
            "slope_level": config.slope_level,
            "wind_level": config.wind_level,
            "wind_direction_rad": config.wind_direction,
            "decision_points": config.decision_points,
            "resources_level": config.resources_level,
            "delay_level": config.delay_level,
            "first_release": config.first_release,
            "last_release": config.last_release,
            "horizon_min": horizon,
            "delay_min": delay,
            "resource_count": config.resource_count,
            "release_times_min": [t for t, _ in schedule],
            "nonstandard_grid": config.n not in STANDARD_GRID_SIZES,
        }
    }
    return WspInstance(
        graph=graph,
        ignition=config.ignition,
        horizon=horizon,
        delay=delay,
        schedule=schedule,
        meta=meta,
    )
