"""Network geometry: node motion models, light-delay edges, lattice builders,
and shortest-path / diameter metrics over the latency graph.

Distances are meters, delays seconds. A graph carries either explicit edge
weights (abstract delays in seconds) or implicit geometric edges whose delay
is recomputed from node positions at a given time; the two kinds are never
mixed, so every delay has one unambiguous definition.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import cached_property

from .relkin import SPEED_OF_LIGHT

Vec3 = tuple[float, float, float]

_XY_PLANE: tuple[Vec3, Vec3] = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0))


class DisconnectedGraphError(ValueError):
    """A graph metric was requested for a pair with no connecting path."""


@dataclass(frozen=True)
class StaticPoint:
    """A node fixed at one position."""

    position: Vec3


@dataclass(frozen=True)
class CircularOrbit:
    """Uniform circular motion about a center, in a configurable orbital
    plane spanned by two orthonormal basis vectors (defaults to xy)."""

    center: Vec3
    radius: float
    angular_velocity: float
    phase: float = 0.0
    plane: tuple[Vec3, Vec3] = _XY_PLANE

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ValueError(f"orbit radius must be nonnegative, got {self.radius!r}")
        if not math.isfinite(self.angular_velocity):
            raise ValueError("orbit angular velocity must be finite")
        if abs(self.angular_velocity * self.radius) >= SPEED_OF_LIGHT:
            raise ValueError(
                f"orbital speed |w*r| = {abs(self.angular_velocity * self.radius)} m/s "
                "must stay below the speed of light"
            )

    @property
    def period(self) -> float:
        """Orbital period in seconds; math.inf for a frozen (w = 0) orbit."""
        if self.angular_velocity == 0.0:
            return math.inf
        return 2.0 * math.pi / abs(self.angular_velocity)


@dataclass(frozen=True)
class LatticeSite:
    """Integer grid indices; spacing is carried by the lattice edge weights,
    so the 'position' of a site is its index triple, not meters."""

    i: int
    j: int
    k: int


MotionSpec = StaticPoint | CircularOrbit | LatticeSite


@dataclass(frozen=True)
class NodeSpec:
    """One network participant: a user, a miner, or a whole pool."""

    id: str
    motion: MotionSpec
    hashpower: float = 1.0
    region: str = ""

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("node id must be a nonempty string")
        if self.hashpower < 0 or not math.isfinite(self.hashpower):
            raise ValueError(f"hashpower must be finite and nonnegative, got {self.hashpower!r}")


def position(node: NodeSpec, t: float) -> Vec3:
    """Position of a node at coordinate time t.

    Static points are constant; orbits trace center + r(cos(wt+phi) u +
    sin(wt+phi) v) in their plane; lattice sites return their index triple.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t!r}")
    m = node.motion
    if isinstance(m, StaticPoint):
        return m.position
    if isinstance(m, CircularOrbit):
        angle = m.angular_velocity * t + m.phase
        ca, sa = math.cos(angle), math.sin(angle)
        u, v = m.plane
        return (
            m.center[0] + m.radius * (ca * u[0] + sa * v[0]),
            m.center[1] + m.radius * (ca * u[1] + sa * v[1]),
            m.center[2] + m.radius * (ca * u[2] + sa * v[2]),
        )
    return (float(m.i), float(m.j), float(m.k))


def light_delay(a: NodeSpec, b: NodeSpec, t: float, c: float = SPEED_OF_LIGHT) -> float:
    """One-way light travel time between two nodes' positions at time t."""
    pa = position(a, t)
    pb = position(b, t)
    return math.dist(pa, pb) / c


@dataclass(frozen=True)
class LatencyGraph:
    """Simple undirected graph of nodes with delay-weighted edges.

    edges is either a tuple of (id_a, id_b, seconds) triples, or None for a
    geometric graph: every pair connected, delay = light travel time between
    positions at the query time.
    """

    nodes: tuple[NodeSpec, ...]
    edges: tuple[tuple[str, str, float], ...] | None = None
    c: float = field(default=SPEED_OF_LIGHT)

    def __post_init__(self) -> None:
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("node ids must be unique")
        if self.edges is None:
            for n in self.nodes:
                if isinstance(n.motion, LatticeSite):
                    raise ValueError(
                        f"node {n.id!r}: lattice sites have no geometry; "
                        "use explicit edge weights"
                    )
            return
        known = set(ids)
        seen_pairs = set()
        for a, b, w in self.edges:
            if a == b:
                raise ValueError(f"self-loop on node {a!r}")
            if a not in known or b not in known:
                raise ValueError(f"edge ({a!r}, {b!r}) references an unknown node")
            if w < 0 or not math.isfinite(w):
                raise ValueError(f"edge ({a!r}, {b!r}) weight must be finite and nonnegative")
            pair = frozenset((a, b))
            if pair in seen_pairs:
                raise ValueError(f"duplicate edge between {a!r} and {b!r}")
            seen_pairs.add(pair)

    @cached_property
    def _by_id(self) -> dict[str, NodeSpec]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def _adjacency(self) -> dict[str, tuple[str, ...]]:
        if self.edges is None:
            ids = [n.id for n in self.nodes]
            return {i: tuple(j for j in ids if j != i) for i in ids}
        adj: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for a, b, _ in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return {i: tuple(v) for i, v in adj.items()}

    @cached_property
    def _weights(self) -> dict[frozenset[str], float]:
        if self.edges is None:
            return {}
        return {frozenset((a, b)): w for a, b, w in self.edges}

    @property
    def geometric(self) -> bool:
        return self.edges is None

    def node(self, node_id: str) -> NodeSpec:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise KeyError(f"unknown node {node_id!r}") from None

    def neighbors(self, node_id: str) -> tuple[str, ...]:
        return self._adjacency[node_id]

    def delay(self, a: str, b: str, t: float) -> float:
        """Delay of the direct edge a--b at time t; symmetric in a and b."""
        if self.edges is None:
            return light_delay(self.node(a), self.node(b), t, self.c)
        try:
            return self._weights[frozenset((a, b))]
        except KeyError:
            raise KeyError(f"no edge between {a!r} and {b!r}") from None


def build_lattice(l: int, w: int, h: int, edge_delay: float) -> LatencyGraph:
    """Axis-aligned l x w x h lattice with every nearest-neighbor edge at the
    same delay. Node ids are n<i>_<j>_<k>, zero-based."""
    if l < 1 or w < 1 or h < 1:
        raise ValueError(f"lattice dimensions must be >= 1, got {(l, w, h)!r}")
    if not edge_delay > 0:
        raise ValueError(f"edge delay must be positive, got {edge_delay!r}")
    nodes = []
    edges = []
    for i in range(l):
        for j in range(w):
            for k in range(h):
                nodes.append(NodeSpec(id=f"n{i}_{j}_{k}", motion=LatticeSite(i, j, k)))
                if i + 1 < l:
                    edges.append((f"n{i}_{j}_{k}", f"n{i + 1}_{j}_{k}", edge_delay))
                if j + 1 < w:
                    edges.append((f"n{i}_{j}_{k}", f"n{i}_{j + 1}_{k}", edge_delay))
                if k + 1 < h:
                    edges.append((f"n{i}_{j}_{k}", f"n{i}_{j}_{k + 1}", edge_delay))
    return LatencyGraph(nodes=tuple(nodes), edges=tuple(edges))


def shortest_path_delays(g: LatencyGraph, source: str, t: float) -> dict[str, float]:
    """Dijkstra from source over edge delays evaluated at time t. Unreachable
    nodes are absent from the result."""
    dist = {source: 0.0}
    heap = [(0.0, source)]
    done: set[str] = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v in g.neighbors(u):
            nd = d + g.delay(u, v, t)
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def diameter(g: LatencyGraph, t: float = 0.0) -> float:
    """Longest shortest-path delay over all node pairs, edges evaluated at
    time t. Raises DisconnectedGraphError naming an unreachable pair."""
    if not g.nodes:
        raise ValueError("graph has no nodes")
    worst = 0.0
    ids = [n.id for n in g.nodes]
    for source in ids:
        dist = shortest_path_delays(g, source, t)
        if len(dist) != len(ids):
            missing = next(i for i in ids if i not in dist)
            raise DisconnectedGraphError(f"no path between {source!r} and {missing!r}")
        worst = max(worst, max(dist.values()))
    return worst


def is_connected(g: LatencyGraph) -> bool:
    if not g.nodes:
        return False
    stack = [g.nodes[0].id]
    seen = {g.nodes[0].id}
    while stack:
        u = stack.pop()
        for v in g.neighbors(u):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == len(g.nodes)
