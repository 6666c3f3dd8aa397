"""Deterministic discrete-event simulator: Poisson mining with relativistic
rate dilation, flooding gossip over the latency graph, per-node block trees
with longest-chain fork choice, and fork/orphan/confirmation accounting.

Determinism contract: identical (scenario, seed) gives an identical report,
independent of how many sweep workers run alongside. The event queue orders
by (time, insertion sequence); every node draws from its own seed-derived
random stream, so adding a node never perturbs another node's samples.
"""

from __future__ import annotations

import hashlib
import heapq
import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import pow as powmod
from .relkin import SPEED_OF_LIGHT, SuperluminalError, gamma
from .topo import DisconnectedGraphError, LatencyGraph, is_connected

_MINE, _BLOCK_ARRIVAL, _TX_ARRIVAL = 0, 1, 2

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class TxSpec:
    """One workload transaction: created at `created` seconds on the origin
    node, destined for (an account on) the destination node."""

    id: str
    created: float
    origin: str
    destination: str


@dataclass(frozen=True)
class Scenario:
    """Full description of one simulation run."""

    graph: LatencyGraph
    blocktime: float
    duration: float
    seed: int
    node_velocities: dict[str, float] = field(default_factory=dict)
    tx_workload: tuple[TxSpec, ...] = ()
    censorship: dict[str, frozenset[str]] = field(default_factory=dict)


@dataclass(frozen=True)
class Block:
    id: int
    parent: int | None
    miner: str
    timestamp: float
    height: int
    txs: tuple[str, ...] = ()


GENESIS = Block(id=0, parent=None, miner="", timestamp=0.0, height=0)


@dataclass(frozen=True)
class TxRecord:
    id: str
    created: float
    origin: str
    destination: str
    confirmed: float | None

    @property
    def latency(self) -> float | None:
        return None if self.confirmed is None else self.confirmed - self.created


@dataclass(frozen=True)
class SimReport:
    """Everything measured in one run. `blocks` is in mining order and
    includes genesis; mined/orphan accounting excludes it."""

    seed: int
    blocktime: float
    duration: float
    blocks: tuple[Block, ...]
    main_chain: frozenset[int]
    height: int
    total_mined: int
    mined: dict[str, int]
    main_counts: dict[str, int]
    orphan_rate: float
    fork_count: int
    tx_records: tuple[TxRecord, ...]
    propagation_mean: float | None
    propagation_max: float | None
    propagation_samples: int
    arrivals: dict[tuple[int, str], float] | None = None


class NodeChainState:
    """One node's view of the block tree.

    `seen` dedupes gossip; `known` holds only blocks whose full ancestry has
    arrived (others wait in `buffered` keyed by the missing parent). The tip
    maximizes height, with ties broken by earliest local arrival and then by
    block id so simultaneous arrivals stay deterministic.
    """

    __slots__ = ("known", "arrival", "tip", "seen", "buffered", "mempool_seen", "confirmed_in_tip")

    def __init__(self, genesis: Block = GENESIS):
        self.known = {genesis.id: genesis}
        self.arrival = {genesis.id: genesis.timestamp}
        self.tip = genesis.id
        self.seen = {genesis.id}
        self.buffered: dict[int, list[Block]] = {}
        self.mempool_seen: set[str] = set()
        self.confirmed_in_tip: set[str] = set()

    def _tip_key(self, block_id: int) -> tuple[int, float, int]:
        b = self.known[block_id]
        return (-b.height, self.arrival[block_id], block_id)

    def _switch_tip(self, new_tip: int) -> None:
        old = self.known[self.tip]
        new = self.known[new_tip]
        if new.parent == old.id:
            self.confirmed_in_tip.update(new.txs)
            self.tip = new_tip
            return
        # reorg: rewind to the common ancestor, then replay the new branch
        a, b = old, new
        gained: list[tuple[str, ...]] = []
        while a.height > b.height:
            self.confirmed_in_tip.difference_update(a.txs)
            a = self.known[a.parent]
        while b.height > a.height:
            gained.append(b.txs)
            b = self.known[b.parent]
        while a.id != b.id:
            self.confirmed_in_tip.difference_update(a.txs)
            gained.append(b.txs)
            a = self.known[a.parent]
            b = self.known[b.parent]
        for txs in gained:
            self.confirmed_in_tip.update(txs)
        self.tip = new_tip

    def _attach(self, block: Block) -> None:
        if block.parent not in self.known:
            self.buffered.setdefault(block.parent, []).append(block)
            return
        queue = [block]
        while queue:
            b = queue.pop(0)
            self.known[b.id] = b
            self.mempool_seen.update(b.txs)
            if self._tip_key(b.id) < self._tip_key(self.tip):
                self._switch_tip(b.id)
            queue.extend(self.buffered.pop(b.id, ()))


def on_block_arrival(
    state: NodeChainState,
    block: Block,
    now: float,
    neighbors: tuple[str, ...] = (),
    sender: str | None = None,
) -> list[str]:
    """Process one gossip delivery at a node; returns the ids to forward to.

    The first arrival stores the block, re-runs fork choice (buffering it if
    the parent is still unknown), and forwards to every neighbor except the
    sender. Duplicates are absorbed with an empty forward set, so flooding
    terminates.
    """
    if block.id in state.seen:
        return []
    state.seen.add(block.id)
    state.arrival[block.id] = now
    state._attach(block)
    return [n for n in neighbors if n != sender]


def next_mining_event(
    rng: np.random.Generator,
    blocktime: float,
    hashshare: float,
    velocity: float = 0.0,
    c: float = SPEED_OF_LIGHT,
) -> float:
    """Seconds of coordinate time until this miner's next block.

    Hash rate is defined in the miner's proper time, so in coordinate time the
    Poisson rate (hashshare / blocktime) is diluted by 1/gamma(velocity). A
    zero hashshare never fires (returns math.inf).
    """
    if not 0.0 <= hashshare <= 1.0:
        raise ValueError(f"hashshare must lie in [0, 1], got {hashshare!r}")
    if hashshare == 0.0:
        return math.inf
    dilation = gamma(velocity, c)
    return float(rng.exponential(blocktime * dilation / hashshare))


def _node_rng(seed: int, node_id: str) -> np.random.Generator:
    # keyed by node id, not position, so streams survive node insertion
    key = int.from_bytes(hashlib.sha256(node_id.encode()).digest()[:8], "big")
    return np.random.default_rng(np.random.SeedSequence([seed & _MASK64, key]))


def validate_scenario(s: Scenario) -> None:
    if not s.blocktime > 0:
        raise ValueError(f"blocktime must be positive, got {s.blocktime!r}")
    if not s.duration > 0:
        raise ValueError(f"duration must be positive, got {s.duration!r}")
    ids = {n.id for n in s.graph.nodes}
    if not any(n.hashpower > 0 for n in s.graph.nodes):
        raise ValueError("at least one node must have hashpower > 0")
    if not is_connected(s.graph):
        raise DisconnectedGraphError("scenario graph is not connected")
    for node_id, v in s.node_velocities.items():
        if node_id not in ids:
            raise ValueError(f"velocity given for unknown node {node_id!r}")
        if not abs(v) < s.graph.c:
            raise SuperluminalError(f"node {node_id!r} velocity |{v}| >= c")
    for tx in s.tx_workload:
        if tx.origin not in ids or tx.destination not in ids:
            raise ValueError(f"transaction {tx.id!r} references an unknown node")
        if tx.created < 0:
            raise ValueError(f"transaction {tx.id!r} created before t=0")
    if len({tx.id for tx in s.tx_workload}) != len(s.tx_workload):
        raise ValueError("transaction ids must be unique")
    for node_id in s.censorship:
        if node_id not in ids:
            raise ValueError(f"censorship entry for unknown node {node_id!r}")


def run(scenario: Scenario, *, record_arrivals: bool = False) -> SimReport:
    """Run the event loop until the scenario duration and report measurements.

    Events are processed in nondecreasing (time, sequence) order; a fixed
    (scenario, seed) pair reproduces the report exactly.
    """
    validate_scenario(scenario)
    g = scenario.graph
    node_ids = [n.id for n in g.nodes]
    n_nodes = len(node_ids)
    total_hash = sum(n.hashpower for n in g.nodes)
    shares = {n.id: n.hashpower / total_hash for n in g.nodes}
    velocities = {i: scenario.node_velocities.get(i, 0.0) for i in node_ids}
    censor = {i: frozenset(scenario.censorship.get(i, ())) for i in node_ids}
    tx_origin = {tx.id: tx.origin for tx in scenario.tx_workload}
    tx_region = {tx.id: g.node(tx.origin).region for tx in scenario.tx_workload}

    states = {i: NodeChainState() for i in node_ids}
    rngs = {i: _node_rng(scenario.seed, i) for i in node_ids}

    heap: list[tuple[float, int, int, object]] = []
    seq = itertools.count()

    def push(time: float, kind: int, payload) -> None:
        heapq.heappush(heap, (time, next(seq), kind, payload))

    for i in node_ids:
        dt = next_mining_event(rngs[i], scenario.blocktime, shares[i], velocities[i], g.c)
        if dt < math.inf:
            push(dt, _MINE, i)
    for tx in scenario.tx_workload:
        push(tx.created, _TX_ARRIVAL, (tx.origin, tx.id, None))

    blocks: dict[int, Block] = {GENESIS.id: GENESIS}
    next_block_id = 1
    confirmed: dict[str, float] = {}
    reach_count: dict[int, int] = {}
    last_arrival: dict[int, float] = {}
    arrivals: dict[tuple[int, str], float] | None = {} if record_arrivals else None

    def deliver_block(node_id: str, block: Block, now: float, sender: str | None) -> None:
        state = states[node_id]
        fresh = block.id not in state.seen
        forward = on_block_arrival(state, block, now, g.neighbors(node_id), sender)
        if not fresh:
            return
        if arrivals is not None:
            arrivals[(block.id, node_id)] = now
        for txid in block.txs:
            if txid not in confirmed and tx_origin[txid] == node_id:
                confirmed[txid] = now
        count = reach_count.get(block.id, 0) + 1
        reach_count[block.id] = count
        if count == n_nodes:
            last_arrival[block.id] = now
        for nbr in forward:
            push(now + g.delay(node_id, nbr, now), _BLOCK_ARRIVAL, (nbr, block, node_id))

    def deliver_tx(node_id: str, txid: str, now: float, sender: str | None) -> None:
        state = states[node_id]
        if txid in state.mempool_seen:
            return
        state.mempool_seen.add(txid)
        for nbr in g.neighbors(node_id):
            if nbr != sender:
                push(now + g.delay(node_id, nbr, now), _TX_ARRIVAL, (nbr, txid, node_id))

    while heap:
        now, _, kind, payload = heapq.heappop(heap)
        if now > scenario.duration:
            break
        if kind == _MINE:
            node_id = payload
            state = states[node_id]
            parent = state.known[state.tip]
            includable = sorted(
                t
                for t in state.mempool_seen
                if t not in state.confirmed_in_tip and tx_region[t] not in censor[node_id]
            )
            block = Block(
                id=next_block_id,
                parent=parent.id,
                miner=node_id,
                timestamp=now,
                height=parent.height + 1,
                txs=tuple(includable),
            )
            next_block_id += 1
            blocks[block.id] = block
            deliver_block(node_id, block, now, sender=None)
            dt = next_mining_event(
                rngs[node_id], scenario.blocktime, shares[node_id], velocities[node_id], g.c
            )
            push(now + dt, _MINE, node_id)
        elif kind == _BLOCK_ARRIVAL:
            node_id, block, sender = payload
            deliver_block(node_id, block, now, sender)
        else:
            node_id, txid, sender = payload
            deliver_tx(node_id, txid, now, sender)

    return _build_report(scenario, blocks, node_ids, confirmed, last_arrival, arrivals)


def _build_report(scenario, blocks, node_ids, confirmed, last_arrival, arrivals) -> SimReport:
    best = min(blocks.values(), key=lambda b: (-b.height, b.timestamp, b.id))
    main_ids = set()
    b: Block | None = best
    while b is not None:
        main_ids.add(b.id)
        b = blocks[b.parent] if b.parent is not None else None

    mined = {i: 0 for i in node_ids}
    main_counts = {i: 0 for i in node_ids}
    for blk in blocks.values():
        if blk.id == GENESIS.id:
            continue
        mined[blk.miner] += 1
        if blk.id in main_ids:
            main_counts[blk.miner] += 1

    total_mined = len(blocks) - 1
    orphan_rate = 0.0 if total_mined == 0 else (total_mined - best.height) / total_mined
    heights = Counter(blk.height for blk in blocks.values() if blk.id != GENESIS.id)
    fork_count = sum(1 for count in heights.values() if count > 1)

    prop = [last_arrival[i] - blocks[i].timestamp for i in sorted(last_arrival)]
    tx_records = tuple(
        TxRecord(
            id=tx.id,
            created=tx.created,
            origin=tx.origin,
            destination=tx.destination,
            confirmed=confirmed.get(tx.id),
        )
        for tx in scenario.tx_workload
    )
    return SimReport(
        seed=scenario.seed,
        blocktime=scenario.blocktime,
        duration=scenario.duration,
        blocks=tuple(blocks[i] for i in sorted(blocks)),
        main_chain=frozenset(main_ids),
        height=best.height,
        total_mined=total_mined,
        mined=mined,
        main_counts=main_counts,
        orphan_rate=orphan_rate,
        fork_count=fork_count,
        tx_records=tx_records,
        propagation_mean=float(np.mean(prop)) if prop else None,
        propagation_max=max(prop) if prop else None,
        propagation_samples=len(prop),
        arrivals=arrivals,
    )


def _run_with_seed(args: tuple[Scenario, int]) -> SimReport:
    scenario, seed = args
    return run(replace(scenario, seed=seed))


def run_sweep(scenario: Scenario, seeds: list[int], workers: int = 1) -> list[SimReport]:
    """Run one report per seed, optionally fanning out to worker processes.
    Results are ordered by the seeds list and independent of worker count."""
    jobs = [(scenario, s) for s in seeds]
    if workers <= 1:
        return [_run_with_seed(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_with_seed, jobs))


def worst_case_confirmation(g: LatencyGraph, t: float = 0.0) -> float:
    """Round trip along the longest shortest path: 2 x diameter. The bound on
    a confirmation that must cross the whole network and come back."""
    from .topo import diameter

    return 2.0 * diameter(g, t)


def dominance_stats(report: SimReport) -> dict[str, dict[str, float]]:
    """Per-node main-chain share and stale fraction (own orphans over own
    mined). All-zero shares on an empty chain."""
    out: dict[str, dict[str, float]] = {}
    for node in sorted(report.mined):
        mined = report.mined[node]
        main = report.main_counts[node]
        out[node] = {
            "share": main / report.height if report.height else 0.0,
            "stale_fraction": (mined - main) / mined if mined else 0.0,
        }
    return out


def flood_arrival_times(g: LatencyGraph, origin: str, t0: float = 0.0) -> dict[str, float]:
    """Event-driven flood of a single message from origin: every node forwards
    on first receipt. Returns first-arrival time per reached node."""
    g.node(origin)
    heap: list[tuple[float, int, str, str | None]] = [(t0, 0, origin, None)]
    seq = itertools.count(1)
    arrival: dict[str, float] = {}
    while heap:
        now, _, node, sender = heapq.heappop(heap)
        if node in arrival:
            continue
        arrival[node] = now
        for nbr in g.neighbors(node):
            if nbr != sender and nbr not in arrival:
                heapq.heappush(heap, (now + g.delay(node, nbr, now), next(seq), nbr, node))
    return arrival


def measure_hash_trials(k: int, templates: int = 200, seed: int = 0) -> float:
    """Desk-scale realism check: mine real SHA-256 headers at target 2^(256-k)
    and return the mean accepting nonce, which should sit near 2^k. Validates
    the Poisson abstraction the simulator runs on."""
    if not 1 <= k <= 24:
        raise ValueError("k must keep the search desk-scale (1..24)")
    rng = np.random.default_rng(seed)
    target = 1 << (256 - k)
    total = 0
    for _ in range(templates):
        header = rng.bytes(16)
        nonce = powmod.mine(header, target, max_nonce=1 << 32)
        total += nonce
    return total / templates
