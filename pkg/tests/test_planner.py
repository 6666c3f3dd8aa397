"""Blocktime lower-bound rules and the single-vs-separate currency verdict."""

from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import ORIGIN, triangle_graph
from relaysim.planner import (
    BoundRule,
    Verdict,
    bound_concentric,
    bound_diameter,
    bound_satellite,
    bound_separate,
    feasibility,
    light_travel_time,
)
from relaysim.relkin import SPEED_OF_LIGHT as C
from relaysim.topo import CircularOrbit, LatencyGraph, NodeSpec, StaticPoint


def test_satellite_bound_is_half_radius():
    b = bound_satellite(10.0)
    assert b.b_min == 5.0
    assert b.rule is BoundRule.SATELLITE
    assert b.inputs == {"r1": 10.0}
    assert bound_satellite(0.0).b_min == 0.0
    assert bound_satellite(451.98).b_min == 225.99


def test_concentric_bound_uses_extreme_radii():
    assert bound_concentric([4.0, 6.0]).b_min == 5.0
    assert bound_concentric([5.0, 5.0]).b_min == 5.0
    # middle orbits never govern
    assert bound_concentric([1.0, 3.0, 9.0]).b_min == 5.0
    assert bound_concentric((4.0, 6.0)).rule is BoundRule.CONCENTRIC


def test_separate_systems_bound_sums_the_span():
    b = bound_separate(2.0, 10.0, 3.0)
    assert b.b_min == 7.5
    assert b.rule is BoundRule.SEPARATE_SYSTEMS
    # degenerate cases collapse onto the other rules
    assert bound_separate(4.0, 0.0, 6.0).b_min == bound_concentric([4.0, 6.0]).b_min
    assert bound_separate(0.0, 451.98, 0.0).b_min == 225.99


def test_bounds_reject_negative_inputs():
    with pytest.raises(ValueError):
        bound_satellite(-1.0)
    with pytest.raises(ValueError):
        bound_concentric([1.0])
    with pytest.raises(ValueError):
        bound_concentric([1.0, -2.0])
    with pytest.raises(ValueError):
        bound_separate(1.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        light_travel_time(-5.0)


def test_light_travel_time_conversion():
    assert light_travel_time(C) == 1.0
    assert light_travel_time(1.35497e11) == pytest.approx(451.98, rel=1e-4)
    assert light_travel_time(0.0) == 0.0


def test_bounds_monotone_in_their_inputs():
    rng = np.random.default_rng(17)
    for _ in range(200):
        r = float(rng.uniform(0.0, 100.0))
        dr = float(rng.uniform(0.0, 10.0))
        assert bound_satellite(r + dr).b_min >= bound_satellite(r).b_min
        radii = rng.uniform(1.0, 100.0, size=3)
        grown = radii.copy()
        grown[int(rng.integers(0, 3))] = grown.max() + dr
        assert bound_concentric(grown.tolist()).b_min >= bound_concentric(radii.tolist()).b_min
        a, al, b = rng.uniform(0.0, 50.0, size=3)
        assert bound_separate(a + dr, al, b).b_min >= bound_separate(a, al, b).b_min
        assert bound_separate(a, al + dr, b).b_min >= bound_separate(a, al, b).b_min


def test_bounds_scale_covariantly():
    # powers of two keep the arithmetic exact
    for k in (0.5, 2.0, 4.0):
        assert bound_satellite(10.0 * k).b_min == bound_satellite(10.0).b_min * k
        assert bound_concentric([4.0 * k, 6.0 * k]).b_min == bound_concentric([4.0, 6.0]).b_min * k
        assert (
            bound_separate(2.0 * k, 10.0 * k, 3.0 * k).b_min
            == bound_separate(2.0, 10.0, 3.0).b_min * k
        )


def test_diameter_bound_on_static_graphs():
    b = bound_diameter(triangle_graph())
    assert b.b_min == 1.5
    assert b.rule is BoundRule.DIAMETER
    assert b.inputs["diameter"] == 3.0
    solo = LatencyGraph(nodes=(NodeSpec("a", ORIGIN),), edges=())
    assert bound_diameter(solo).b_min == 0.0


def _orbit(radius_s: float, period: float, phase: float = 0.0) -> CircularOrbit:
    return CircularOrbit(
        center=(0.0, 0.0, 0.0),
        radius=radius_s * C,
        angular_velocity=2.0 * math.pi / period,
        phase=phase,
    )


def test_diameter_bound_matches_concentric_rule_when_locked_at_opposition():
    # equal periods freeze the relative geometry at its worst
    g = LatencyGraph(
        nodes=(
            NodeSpec("p1", _orbit(4.0, 100.0, phase=math.pi)),
            NodeSpec("p2", _orbit(6.0, 100.0)),
        ),
        edges=None,
    )
    assert bound_diameter(g).b_min == pytest.approx(bound_concentric([4.0, 6.0]).b_min, rel=1e-12)


def test_diameter_bound_sweeps_synodic_window():
    # different periods: the sampler must catch opposition on its own
    g = LatencyGraph(
        nodes=(
            NodeSpec("p1", _orbit(4.0, 200.0)),
            NodeSpec("p2", _orbit(6.0, 400.0)),
        ),
        edges=None,
    )
    b = bound_diameter(g)
    assert b.b_min == pytest.approx(5.0, rel=0.01)
    assert b.b_min <= 5.0  # sampling can only understate the true maximum


def test_diameter_bound_matches_separate_rule_on_two_systems():
    center2 = (10.0 * C, 0.0, 0.0)
    g = LatencyGraph(
        nodes=(
            NodeSpec("p1", _orbit(2.0, 100.0, phase=math.pi)),
            NodeSpec(
                "p2",
                CircularOrbit(center=center2, radius=3.0 * C, angular_velocity=2.0 * math.pi / 100.0),
            ),
        ),
        edges=None,
    )
    # worst configuration sits at t=0 (both on far sides), a sampled epoch
    assert bound_diameter(g).b_min == pytest.approx(bound_separate(2.0, 10.0, 3.0).b_min, rel=1e-12)


def test_diameter_bound_sampling_arguments():
    g = LatencyGraph(
        nodes=(NodeSpec("p1", _orbit(4.0, 100.0)), NodeSpec("p2", _orbit(6.0, 150.0))),
        edges=None,
    )
    with pytest.raises(ValueError):
        bound_diameter(g, samples=1)
    # explicit window override is honored and recorded
    b = bound_diameter(g, samples=16, window=1.0)
    assert b.inputs["samples"] == 16
    assert b.inputs["window"] == 1.0


def test_static_geometric_graph_evaluated_once():
    g = LatencyGraph(
        nodes=(
            NodeSpec("a", StaticPoint((0.0, 0.0, 0.0))),
            NodeSpec("b", StaticPoint((3.0 * C, 0.0, 0.0))),
        ),
        edges=None,
    )
    assert bound_diameter(g, samples=2).b_min == 1.5


def test_feasibility_triangle():
    g = triangle_graph()
    ok = feasibility(g, max_confirmation=10.0)
    assert ok.verdict is Verdict.SINGLE_CURRENCY
    assert ok.governing_latency == 6.0
    assert ok.threshold == 10.0
    tight = feasibility(g, max_confirmation=5.0)
    assert tight.verdict is Verdict.SEPARATE_CURRENCIES
    assert tight.governing_latency == 6.0


def test_feasibility_boundary_is_inclusive():
    # a round trip exactly at the threshold still supports one currency
    assert feasibility(triangle_graph(), max_confirmation=6.0).verdict is Verdict.SINGLE_CURRENCY


def test_feasibility_single_node_always_single_currency():
    solo = LatencyGraph(nodes=(NodeSpec("a", ORIGIN),), edges=())
    v = feasibility(solo, max_confirmation=1e-6)
    assert v.verdict is Verdict.SINGLE_CURRENCY
    assert v.governing_latency == 0.0
    with pytest.raises(ValueError):
        feasibility(solo, max_confirmation=0.0)
