"""Geometry, motion, latency graphs, and shortest-path delays."""

from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import ORIGIN, floyd_warshall, fw_diameter, triangle_graph, two_node_graph
from relaysim.relkin import SPEED_OF_LIGHT as C
from relaysim.topo import (
    CircularOrbit,
    DisconnectedGraphError,
    LatencyGraph,
    LatticeSite,
    NodeSpec,
    StaticPoint,
    build_lattice,
    diameter,
    is_connected,
    light_delay,
    position,
    shortest_path_delays,
)


def test_static_point_position_constant():
    node = NodeSpec("x", StaticPoint((1.0, 2.0, 3.0)))
    assert position(node, 0.0) == (1.0, 2.0, 3.0)
    assert position(node, 1e9) == (1.0, 2.0, 3.0)


def test_orbit_position_at_quarter_period():
    orbit = CircularOrbit(center=(0.0, 0.0, 0.0), radius=10.0, angular_velocity=2 * math.pi / 100)
    node = NodeSpec("x", orbit)
    x0, y0, z0 = position(node, 0.0)
    assert (x0, y0, z0) == pytest.approx((10.0, 0.0, 0.0))
    x1, y1, z1 = position(node, 25.0)
    assert (x1, y1, z1) == pytest.approx((0.0, 10.0, 0.0), abs=1e-9)
    assert orbit.period == pytest.approx(100.0)


def test_orbit_phase_offset():
    orbit = CircularOrbit(center=(5.0, 0.0, 0.0), radius=2.0, angular_velocity=1.0, phase=math.pi)
    assert position(NodeSpec("x", orbit), 0.0) == pytest.approx((3.0, 0.0, 0.0), abs=1e-12)


def test_orbit_tangential_speed_must_stay_subluminal():
    with pytest.raises(ValueError, match="speed of light"):
        CircularOrbit(center=(0.0, 0.0, 0.0), radius=C, angular_velocity=1.0)
    # exactly below the limit is fine
    CircularOrbit(center=(0.0, 0.0, 0.0), radius=C * 0.99, angular_velocity=1.0)


def test_light_delay_earth_mars_distance():
    a = NodeSpec("earth", ORIGIN)
    b = NodeSpec("mars", StaticPoint((1.35497e11, 0.0, 0.0)))
    delay = light_delay(a, b, 0.0)
    # one-way delay at this separation is about 7.533 light-minutes
    assert delay == pytest.approx(451.98, rel=1e-4)
    assert light_delay(b, a, 0.0) == delay


def test_graph_validation_rejects_bad_shapes():
    n1 = NodeSpec("a", ORIGIN)
    n2 = NodeSpec("b", ORIGIN)
    with pytest.raises(ValueError):
        LatencyGraph(nodes=(n1, NodeSpec("a", ORIGIN)), edges=())
    with pytest.raises(ValueError):
        LatencyGraph(nodes=(n1, n2), edges=(("a", "a", 1.0),))
    with pytest.raises(ValueError):
        LatencyGraph(nodes=(n1, n2), edges=(("a", "c", 1.0),))
    with pytest.raises(ValueError):
        LatencyGraph(nodes=(n1, n2), edges=(("a", "b", -1.0),))
    with pytest.raises(ValueError):
        LatencyGraph(nodes=(n1, n2), edges=(("a", "b", 1.0), ("b", "a", 2.0)))


def test_geometric_graph_rejects_lattice_sites():
    with pytest.raises(ValueError):
        LatencyGraph(nodes=(NodeSpec("a", LatticeSite(0, 0, 0)), NodeSpec("b", ORIGIN)), edges=None)


def test_geometric_graph_is_complete_with_light_delays():
    g = LatencyGraph(
        nodes=(
            NodeSpec("a", ORIGIN),
            NodeSpec("b", StaticPoint((C, 0.0, 0.0))),
            NodeSpec("c", StaticPoint((0.0, 2 * C, 0.0))),
        ),
        edges=None,
    )
    assert g.geometric
    assert sorted(g.neighbors("a")) == ["b", "c"]
    assert g.delay("a", "b", 0.0) == pytest.approx(1.0)
    assert g.delay("a", "c", 0.0) == pytest.approx(2.0)
    assert g.delay("b", "c", 123.0) == pytest.approx(math.hypot(1.0, 2.0))


def test_geometric_delay_tracks_orbits_over_time():
    g = LatencyGraph(
        nodes=(
            NodeSpec("hub", ORIGIN),
            NodeSpec(
                "sat",
                CircularOrbit(center=(0.0, 0.0, 0.0), radius=3 * C, angular_velocity=2 * math.pi / 40),
            ),
        ),
        edges=None,
    )
    assert g.delay("hub", "sat", 0.0) == pytest.approx(3.0)
    assert g.delay("hub", "sat", 17.0) == pytest.approx(3.0)  # circular: constant range


def test_explicit_graph_ignores_time():
    g = two_node_graph(451.98)
    assert not g.geometric
    assert g.delay("a", "b", 0.0) == 451.98
    assert g.delay("a", "b", 1e7) == 451.98


def test_build_lattice_counts():
    g = build_lattice(4, 4, 4, 100.0)
    assert len(g.nodes) == 64
    # 3 axes of (n-1) links per line
    assert len(g.edges) == 3 * 4 * 4 * 3
    assert {n.id for n in g.nodes} >= {"n0_0_0", "n3_3_3"}
    assert all(w == 100.0 for _, _, w in g.edges)
    assert is_connected(g)


def test_build_lattice_rejects_bad_dims():
    with pytest.raises(ValueError):
        build_lattice(0, 4, 4, 1.0)
    with pytest.raises(ValueError):
        build_lattice(2, 2, 2, -1.0)


def test_shortest_paths_triangle_uses_relay():
    g = triangle_graph()
    dist = shortest_path_delays(g, "mars", 0.0)
    assert dist["venus"] == 3.0  # through earth, not the direct 4.0 edge
    assert dist["earth"] == 1.0
    assert dist["mars"] == 0.0


def test_shortest_paths_match_floyd_warshall_random_graphs():
    rng = np.random.default_rng(23)
    for trial in range(20):
        n = int(rng.integers(2, 9))
        ids = [f"v{i}" for i in range(n)]
        nodes = tuple(NodeSpec(i, ORIGIN) for i in ids)
        edges = []
        # random spanning chain keeps it connected, plus extra chords
        for i in range(1, n):
            edges.append((ids[i - 1], ids[i], float(rng.uniform(0.1, 10.0))))
        for _ in range(int(rng.integers(0, n))):
            i, j = rng.integers(0, n, size=2)
            if i != j and not any({ids[i], ids[j]} == {a, b} for a, b, _ in edges):
                edges.append((ids[i], ids[j], float(rng.uniform(0.1, 10.0))))
        g = LatencyGraph(nodes=nodes, edges=tuple(edges))
        oracle = floyd_warshall(g)
        for source in ids:
            dist = shortest_path_delays(g, source, 0.0)
            for target in ids:
                assert dist[target] == pytest.approx(oracle[(source, target)], rel=1e-12)


def test_diameter_triangle():
    g = triangle_graph()
    assert diameter(g) == 3.0
    assert diameter(g) == fw_diameter(g)


def test_diameter_single_node_is_zero():
    g = LatencyGraph(nodes=(NodeSpec("solo", ORIGIN),), edges=())
    assert diameter(g) == 0.0
    assert is_connected(g)


def test_diameter_lattice_corner_to_corner():
    g = build_lattice(4, 4, 4, 100.0)
    assert diameter(g) == pytest.approx(900.0)
    dist = shortest_path_delays(g, "n0_0_0", 0.0)
    assert dist["n3_3_3"] == pytest.approx(900.0)


def test_disconnected_graph_raises_with_pair():
    g = LatencyGraph(nodes=(NodeSpec("a", ORIGIN), NodeSpec("b", ORIGIN)), edges=())
    assert not is_connected(g)
    with pytest.raises(DisconnectedGraphError, match="'a'.*'b'|'b'.*'a'"):
        diameter(g)


def test_node_spec_validation():
    with pytest.raises(ValueError):
        NodeSpec("", ORIGIN)
    with pytest.raises(ValueError):
        NodeSpec("a", ORIGIN, hashpower=-0.5)


def test_geometric_diameter_varies_with_orbits():
    # two orbits starting at opposition drift toward conjunction
    g = LatencyGraph(
        nodes=(
            NodeSpec(
                "p1",
                CircularOrbit(center=(0.0, 0.0, 0.0), radius=4 * C, angular_velocity=2 * math.pi / 200, phase=math.pi),
            ),
            NodeSpec(
                "p2",
                CircularOrbit(center=(0.0, 0.0, 0.0), radius=6 * C, angular_velocity=2 * math.pi / 400),
            ),
        ),
        edges=None,
    )
    assert diameter(g, 0.0) == pytest.approx(10.0)
    # half a synodic period later they are aligned
    synodic = 2 * math.pi / abs(2 * math.pi / 200 - 2 * math.pi / 400)
    assert diameter(g, synodic / 2) == pytest.approx(2.0, rel=1e-9)
