"""relaysim: planning and simulation for proof-of-work networks whose nodes
are separated by astronomical distances.

Messages travel at light speed, miners may move fast enough for time dilation
to matter, and the toolkit answers two questions: what blocktime keeps forks
rare on a given layout, and whether one shared currency can meet a
confirmation deadline at all.
"""

from .planner import (
    BlocktimeBound,
    BoundRule,
    FeasibilityVerdict,
    Verdict,
    bound_concentric,
    bound_diameter,
    bound_satellite,
    bound_separate,
    feasibility,
    light_travel_time,
)
from .pow import DEFAULT_SCHEDULE, SubsidySchedule, block_subsidy, check_pow, decode_compact, mine, total_supply
from .relkin import (
    SPEED_OF_LIGHT,
    CausalClass,
    CausalKind,
    SpacetimeEvent,
    SuperluminalError,
    boost,
    classify,
    contracted_length,
    gamma,
    interval_squared,
    kinetic_energy,
    proper_elapsed,
)
from .scenario import ScenarioDoc, ScenarioError, load, load_bundled, loads
from .simcore import (
    Block,
    Scenario,
    SimReport,
    TxSpec,
    dominance_stats,
    flood_arrival_times,
    run,
    run_sweep,
    worst_case_confirmation,
)
from .topo import (
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
    shortest_path_delays,
)

__version__ = "0.1.0"
