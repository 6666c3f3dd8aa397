"""Special-relativity kernel: Lorentz boosts, time dilation, length contraction,
kinetic energy, and causal classification of event pairs.

Everything here is 1+1 dimensional: a boost acts along a single spatial axis.
3D geometry lives in :mod:`relaysim.topo`, which reduces positions to scalar
distances before any of these functions see them. The speed of light is an
explicit parameter everywhere (defaulting to the SI value) so that the
Galilean limit can be probed by inflating it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

SPEED_OF_LIGHT = 299_792_458.0
"""Speed of light in vacuum, m/s (exact by SI definition)."""

LIGHTLIKE_RTOL = 1e-12
"""Relative tolerance on |v_info - c| below which an event pair counts as lightlike."""


class SuperluminalError(ValueError):
    """Raised when an operation is requested for a frame speed |v| >= c."""


@dataclass(frozen=True)
class SpacetimeEvent:
    """A (t, x) coordinate pair: seconds and meters along the boost axis."""

    t: float
    x: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t) and math.isfinite(self.x)):
            raise ValueError(f"event coordinates must be finite, got t={self.t!r} x={self.x!r}")


class CausalKind(Enum):
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"
    SPACELIKE = "spacelike"


@dataclass(frozen=True)
class CausalClass:
    """Causal relation of an event pair: the kind plus the information speed
    |dx/dt| that linking the two events would require (math.inf when dt == 0
    and dx != 0)."""

    kind: CausalKind
    v_info: float


def _require_subluminal(v: float, c: float) -> None:
    if not (abs(v) < c):
        raise SuperluminalError(f"superluminal frame: |v| = {abs(v)} >= c = {c}")


def gamma(v: float, c: float = SPEED_OF_LIGHT) -> float:
    """Lorentz factor 1/sqrt(1 - (v/c)^2). Always >= 1 for |v| < c."""
    _require_subluminal(v, c)
    beta = v / c
    return 1.0 / math.sqrt(1.0 - beta * beta)


def boost(event: SpacetimeEvent, v: float, c: float = SPEED_OF_LIGHT) -> SpacetimeEvent:
    """Transform an event into the frame moving at +v along x.

    x' = gamma (x - v t),  t' = gamma (t - v x / c^2).  The transform is
    linear, so it applies unchanged to event deltas.
    """
    g = gamma(v, c)
    xp = g * (event.x - v * event.t)
    tp = g * (event.t - v * event.x / (c * c))
    return SpacetimeEvent(t=tp, x=xp)


def proper_elapsed(coordinate_dt: float, v: float, c: float = SPEED_OF_LIGHT) -> float:
    """Proper time ticked by a clock moving at speed v while coordinate time
    coordinate_dt elapses: coordinate_dt / gamma(v)."""
    if coordinate_dt < 0:
        raise ValueError(f"duration must be nonnegative, got {coordinate_dt!r}")
    return coordinate_dt / gamma(v, c)


def contracted_length(proper_length: float, v: float, c: float = SPEED_OF_LIGHT) -> float:
    """Length of a rod of rest length proper_length measured from a frame in
    which it moves at speed v: proper_length / gamma(v)."""
    if proper_length < 0:
        raise ValueError(f"length must be nonnegative, got {proper_length!r}")
    return proper_length / gamma(v, c)


def classify(delta_t: float, delta_x: float, c: float = SPEED_OF_LIGHT) -> CausalClass:
    """Classify an event pair by the signal speed required to connect it.

    v_info = |dx|/|dt|; timelike below c, spacelike above, lightlike within
    LIGHTLIKE_RTOL of c (exact float equality at c would be meaningless).
    Colocated simultaneous events (both deltas zero) classify as timelike
    with v_info = 0.
    """
    dt = abs(delta_t)
    dx = abs(delta_x)
    if dt == 0.0:
        v_info = 0.0 if dx == 0.0 else math.inf
    else:
        v_info = dx / dt
    if math.isfinite(v_info) and abs(v_info - c) <= LIGHTLIKE_RTOL * c:
        kind = CausalKind.LIGHTLIKE
    elif v_info < c:
        kind = CausalKind.TIMELIKE
    else:
        kind = CausalKind.SPACELIKE
    return CausalClass(kind=kind, v_info=v_info)


def kinetic_energy(mass: float, v: float, c: float = SPEED_OF_LIGHT) -> float:
    """Relativistic kinetic energy (gamma - 1) m c^2 in joules."""
    if mass < 0:
        raise ValueError(f"mass must be nonnegative, got {mass!r}")
    try:
        g = gamma(v, c)
    except SuperluminalError:
        raise SuperluminalError(
            f"reaching |v| = {abs(v)} >= c would require infinite energy"
        ) from None
    return (g - 1.0) * mass * c * c


def interval_squared(delta_t: float, delta_x: float, c: float = SPEED_OF_LIGHT) -> float:
    """Invariant interval c^2 dt^2 - dx^2; preserved by any valid boost."""
    return (c * delta_t) ** 2 - delta_x**2
