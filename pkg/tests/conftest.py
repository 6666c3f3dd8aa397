"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import itertools
import math

from relaysim.topo import LatencyGraph, NodeSpec, StaticPoint

ORIGIN = StaticPoint((0.0, 0.0, 0.0))


def floyd_warshall(g: LatencyGraph, t: float = 0.0) -> dict[tuple[str, str], float]:
    """All-pairs shortest delays computed independently of the library's
    Dijkstra, for cross-checking."""
    ids = [n.id for n in g.nodes]
    dist = {(a, b): (0.0 if a == b else math.inf) for a in ids for b in ids}
    for a in ids:
        for b in g.neighbors(a):
            dist[(a, b)] = min(dist[(a, b)], g.delay(a, b, t))
    for k, i, j in itertools.product(ids, ids, ids):
        through = dist[(i, k)] + dist[(k, j)]
        if through < dist[(i, j)]:
            dist[(i, j)] = through
    return dist


def fw_diameter(g: LatencyGraph, t: float = 0.0) -> float:
    dist = floyd_warshall(g, t)
    return max(dist.values())


def two_node_graph(delay: float, hash_a: float = 0.5, hash_b: float = 0.5) -> LatencyGraph:
    return LatencyGraph(
        nodes=(
            NodeSpec("a", ORIGIN, hashpower=hash_a, region="ra"),
            NodeSpec("b", ORIGIN, hashpower=hash_b, region="rb"),
        ),
        edges=(("a", "b", delay),),
    )


def triangle_graph() -> LatencyGraph:
    # direct mars-venus edge (4) loses to the relay through earth (1 + 2)
    return LatencyGraph(
        nodes=(
            NodeSpec("earth", ORIGIN),
            NodeSpec("mars", ORIGIN),
            NodeSpec("venus", ORIGIN),
        ),
        edges=(("earth", "mars", 1.0), ("earth", "venus", 2.0), ("mars", "venus", 4.0)),
    )
