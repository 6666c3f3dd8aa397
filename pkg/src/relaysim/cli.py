"""Command-line entry points.

Subcommands: causality (classify an event pair under a frame boost), plan
(blocktime bounds and the currency-feasibility verdict for a scenario),
simulate (run the event simulator and write reports), difficulty (decode a
compact difficulty field). Human-readable tables go to stdout; CSV files,
key/value summaries, and figures go to --output-dir.

Exit codes: 0 success, 2 parse/usage error, 3 graph error (disconnected),
4 numeric-domain error (superluminal velocity, target overflow).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import planner, report, scenario
from .pow import TargetOverflowError, decode_compact
from .relkin import SpacetimeEvent, SuperluminalError, boost, classify, gamma
from .scenario import ScenarioDoc, ScenarioError
from .simcore import flood_arrival_times, run, run_sweep
from .topo import DisconnectedGraphError


def _seconds(tok: str) -> float:
    # bare numbers are seconds; unit suffixes (s, min) also accepted
    try:
        return float(tok)
    except ValueError:
        return scenario._duration(tok)


def _velocity(tok: str) -> float:
    try:
        return float(tok)
    except ValueError:
        return scenario._velocity(tok)


def _load_doc(name: str) -> ScenarioDoc:
    path = Path(name)
    if path.exists():
        return scenario.load(path)
    if "/" not in name and "\\" not in name:
        return scenario.load_bundled(name)
    raise ScenarioError(f"scenario file {name!r} not found")


def _plan_bound(doc: ScenarioDoc) -> planner.BlocktimeBound:
    p = doc.topology_params
    if doc.kind == "satellite":
        return planner.bound_satellite(p["r1"])
    if doc.kind == "concentric":
        return planner.bound_concentric(p["radii"])
    if doc.kind == "separate-systems":
        return planner.bound_separate(p["r1"], p["alpha"], p["r2"])
    return planner.bound_diameter(doc.graph)


def _plan_pairs(doc: ScenarioDoc) -> list[tuple[str, object]]:
    bound = _plan_bound(doc)
    pairs: list[tuple[str, object]] = [("rule", bound.rule.value), ("b_min", bound.b_min)]
    for key in sorted(bound.inputs):
        pairs.append((f"input.{key}", bound.inputs[key]))
    if doc.max_confirmation is not None:
        fv = planner.feasibility(doc.graph, doc.max_confirmation)
        pairs += [
            ("verdict", fv.verdict.value),
            ("governing_latency", fv.governing_latency),
            ("threshold", fv.threshold),
        ]
    return pairs


def _lattice_pairs(doc: ScenarioDoc) -> list[tuple[str, object]]:
    p = doc.topology_params
    l, w, h = p["l"], p["w"], p["h"]
    corner_a = "n0_0_0"
    corner_b = f"n{l - 1}_{w - 1}_{h - 1}"
    flood = flood_arrival_times(doc.graph, corner_a)
    # the volume formula is printed for comparison only; flooding follows
    # shortest paths, not the node count
    return [
        ("lattice_corner_delay", flood[corner_b]),
        ("lattice_volume_formula", p["edge_delay"] * l * w * h),
    ]


def _cmd_causality(args) -> int:
    g = gamma(args.velocity)
    moved = boost(SpacetimeEvent(t=args.dt, x=args.dx), args.velocity)
    cls = classify(args.dt, args.dx)
    print(f"gamma = {g!r}")
    print(f"dt_prime = {moved.t!r} s")
    print(f"dx_prime = {moved.x!r} m")
    print(f"v_info = {cls.v_info!r} m/s")
    print(f"class = {cls.kind.value}")
    return 0


def _cmd_difficulty(args) -> int:
    tok = args.bits.lower()
    tok = tok[2:] if tok.startswith("0x") else tok
    if len(tok) != 8 or any(ch not in "0123456789abcdef" for ch in tok):
        raise ValueError(f"bits must be 8 hex digits, got {args.bits!r}")
    target = decode_compact(int(tok, 16))
    print(f"bits = 0x{tok}")
    print(f"target = {target}")
    print(f"target_hex = {target:#x}")
    return 0


def _cmd_plan(args) -> int:
    doc = _load_doc(args.scenario)
    pairs = _plan_pairs(doc)
    if doc.kind == "lattice":
        pairs += _lattice_pairs(doc)
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    report.write_summary(pairs, outdir / "plan_summary.txt")
    print(report.format_pairs(pairs, args.format))
    return 0


def _cmd_simulate(args) -> int:
    doc = _load_doc(args.scenario)
    sc = doc.to_scenario(blocktime=args.blocktime, duration=args.duration, seed=args.seed)
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    extras = _plan_pairs(doc)
    if doc.kind == "lattice":
        extras += _lattice_pairs(doc)

    if args.seeds > 1:
        seeds = list(range(sc.seed, sc.seed + args.seeds))
        reports = run_sweep(sc, seeds, workers=args.workers)
        report.write_sweep_csv(reports, outdir / "sweep.csv")
        pairs = [
            ("seeds", args.seeds),
            ("seed_base", sc.seed),
            ("blocktime", sc.blocktime),
            ("duration", sc.duration),
            ("mean_orphan_rate", float(np.mean([r.orphan_rate for r in reports]))),
            ("mean_height", float(np.mean([r.height for r in reports]))),
            ("mean_fork_count", float(np.mean([r.fork_count for r in reports]))),
        ] + extras
        report.write_summary(pairs, outdir / "summary.txt")
        print(report.format_pairs(pairs, args.format))
        return 0

    rep = run(sc)
    pairs = report.summary_pairs(rep, extras)
    report.write_blocks_csv(rep, outdir / "blocks.csv")
    report.write_txs_csv(rep, outdir / "transactions.csv")
    report.write_summary(pairs, outdir / "summary.txt")
    report.fig_blocks_timeline(rep, outdir / "blocks_timeline.png")
    report.fig_dominance(rep, outdir / "dominance.png")
    report.fig_latency_hist(rep, outdir / "latency_hist.png")
    print(report.format_pairs(pairs, args.format))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaysim",
        description="Planning and simulation for proof-of-work networks with "
        "light-delay latencies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("causality", help="classify an event pair under a frame boost")
    p.add_argument("dt", type=float, help="coordinate time separation in seconds")
    p.add_argument("dx", type=float, help="spatial separation in meters")
    p.add_argument("velocity", type=_velocity, help="frame velocity (m/s, or e.g. 0.98c)")
    p.set_defaults(func=_cmd_causality)

    p = sub.add_parser("difficulty", help="decode a compact difficulty field")
    p.add_argument("bits", help="8 hex digits, e.g. 1903a30c")
    p.set_defaults(func=_cmd_difficulty)

    for name, helptext in (
        ("plan", "compute blocktime bounds and the feasibility verdict"),
        ("simulate", "run the event simulator and write reports"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("scenario", help="scenario file path or bundled name")
        p.add_argument("--output-dir", default="out", help="directory for machine outputs")
        p.add_argument(
            "--format",
            choices=("table", "csv", "json-lines"),
            default="table",
            help="stdout rendering",
        )
        if name == "simulate":
            p.add_argument("--seed", type=int, default=None, help="override scenario seed")
            p.add_argument("--blocktime", type=_seconds, default=None, help="override blocktime")
            p.add_argument("--duration", type=_seconds, default=None, help="override duration")
            p.add_argument("--seeds", type=int, default=1, help="sweep over N consecutive seeds")
            p.add_argument("--workers", type=int, default=1, help="parallel sweep processes")
            p.set_defaults(func=_cmd_simulate)
        else:
            p.set_defaults(func=_cmd_plan)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SuperluminalError, TargetOverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except DisconnectedGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
