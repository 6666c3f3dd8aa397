"""Blocktime planning rules for interplanetary network layouts.

Each rule returns a strict lower bound b_min: a network should pick its mean
inter-block interval B > b_min or forks dominate. All radii and separations
are light-travel times in seconds; `light_travel_time` converts from meters.
The closed forms all reduce to (maximum pairwise separation)/2 for their
geometry; the diameter rule generalizes that to arbitrary graphs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .relkin import SPEED_OF_LIGHT
from .topo import CircularOrbit, LatencyGraph, diameter


class BoundRule(Enum):
    SATELLITE = "satellite"
    CONCENTRIC = "concentric"
    SEPARATE_SYSTEMS = "separate-systems"
    DIAMETER = "diameter"


@dataclass(frozen=True)
class BlocktimeBound:
    """Strict lower bound: a recommended blocktime must satisfy B > b_min."""

    b_min: float
    rule: BoundRule
    inputs: dict


class Verdict(Enum):
    SINGLE_CURRENCY = "single-currency"
    SEPARATE_CURRENCIES = "separate-currencies"


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Separate currencies exactly when the governing round-trip latency
    exceeds the acceptable confirmation threshold."""

    verdict: Verdict
    governing_latency: float
    threshold: float


def light_travel_time(meters: float, c: float = SPEED_OF_LIGHT) -> float:
    """Convert a distance to its one-way light delay in seconds."""
    if meters < 0:
        raise ValueError(f"distance must be nonnegative, got {meters!r}")
    return meters / c


def bound_satellite(r1: float) -> BlocktimeBound:
    """Planet with one satellite at light-distance r1: b_min = r1/2."""
    if r1 < 0:
        raise ValueError(f"radius must be nonnegative, got {r1!r}")
    return BlocktimeBound(b_min=r1 / 2.0, rule=BoundRule.SATELLITE, inputs={"r1": r1})


def bound_concentric(radii) -> BlocktimeBound:
    """Planets on concentric circular orbits around a common center.

    Worst separation is between the innermost and outermost planet at
    opposition, so b_min = (min + max)/2. Radii of intermediate planets do
    not move the bound.
    """
    radii = tuple(radii)
    if len(radii) < 2:
        raise ValueError(f"need at least 2 radii, got {len(radii)}")
    if any(r < 0 for r in radii):
        raise ValueError(f"radii must be nonnegative, got {radii!r}")
    return BlocktimeBound(
        b_min=(min(radii) + max(radii)) / 2.0,
        rule=BoundRule.CONCENTRIC,
        inputs={"radii": radii},
    )


def bound_separate(r1: float, alpha: float, r2: float) -> BlocktimeBound:
    """Two orbital systems of radii r1, r2 whose centers sit alpha apart:
    b_min = (r1 + alpha + r2)/2, the half worst-case separation with both
    planets on far sides."""
    if r1 < 0 or alpha < 0 or r2 < 0:
        raise ValueError(f"inputs must be nonnegative, got {(r1, alpha, r2)!r}")
    return BlocktimeBound(
        b_min=(r1 + alpha + r2) / 2.0,
        rule=BoundRule.SEPARATE_SYSTEMS,
        inputs={"r1": r1, "alpha": alpha, "r2": r2},
    )


def _default_window(g: LatencyGraph) -> float | None:
    """Smallest time span guaranteed to show every relative configuration:
    the longest of all orbit periods and pairwise synodic periods. None for
    graphs whose delays never change."""
    if not g.geometric:
        return None
    omegas = [
        n.motion.angular_velocity
        for n in g.nodes
        if isinstance(n.motion, CircularOrbit) and n.motion.angular_velocity != 0.0
    ]
    if not omegas:
        return None
    spans = [2.0 * math.pi / abs(w) for w in omegas]
    for wa, wb in itertools.combinations(omegas, 2):
        if wa != wb:
            spans.append(2.0 * math.pi / abs(wa - wb))
    return max(spans)


def _max_diameter(g: LatencyGraph, samples: int, window: float | None) -> float:
    if window is None:
        window = _default_window(g)
    if window is None:
        return diameter(g, 0.0)
    if samples < 2:
        raise ValueError(f"need at least 2 samples over a window, got {samples}")
    return max(diameter(g, float(t)) for t in np.linspace(0.0, window, samples))


def bound_diameter(
    g: LatencyGraph, samples: int = 1024, window: float | None = None
) -> BlocktimeBound:
    """General-topology rule: half the worst graph diameter.

    Static graphs are evaluated once. Graphs with orbiting nodes are sampled
    at `samples` evenly spaced epochs over `window` (default: the longest
    orbital or pairwise synodic period, covering every relative geometry).
    Sampling understates a maximum that falls between epochs; at 1024 samples
    the miss is far inside a 1% tolerance for circular orbits.
    """
    worst = _max_diameter(g, samples, window)
    return BlocktimeBound(
        b_min=worst / 2.0,
        rule=BoundRule.DIAMETER,
        inputs={"diameter": worst, "samples": samples, "window": window},
    )


def feasibility(
    g: LatencyGraph,
    max_confirmation: float,
    samples: int = 1024,
    window: float | None = None,
) -> FeasibilityVerdict:
    """Decide whether one shared currency can meet a confirmation deadline.

    Governing latency is the worst-case round trip, 2 x diameter (maximized
    over a sampling window when the geometry moves). If it exceeds
    max_confirmation, no blocktime can help and the verdict recommends
    separate currencies per region.
    """
    if not max_confirmation > 0:
        raise ValueError(f"max_confirmation must be positive, got {max_confirmation!r}")
    governing = 2.0 * _max_diameter(g, samples, window)
    verdict = (
        Verdict.SEPARATE_CURRENCIES if governing > max_confirmation else Verdict.SINGLE_CURRENCY
    )
    return FeasibilityVerdict(
        verdict=verdict, governing_latency=governing, threshold=max_confirmation
    )
