"""Report emission: delimited files, key/value summaries, and figures.

Machine outputs (CSV, summary) go to files; human tables render to a string
for standard output. Figures are rendered with the Agg backend so runs work
headless, and every writer iterates in a fixed order so a fixed seed yields
byte-identical files.
"""

from __future__ import annotations

import csv
import json

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .simcore import SimReport, dominance_stats


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def summary_pairs(report: SimReport, extras: list[tuple[str, object]] | None = None):
    """Flatten a report into ordered (key, value) pairs. `extras` (planner
    bounds, topology-specific diagnostics) are appended as given."""
    pairs: list[tuple[str, object]] = [
        ("seed", report.seed),
        ("blocktime", report.blocktime),
        ("duration", report.duration),
        ("height", report.height),
        ("total_mined", report.total_mined),
        ("orphan_rate", report.orphan_rate),
        ("fork_count", report.fork_count),
        ("propagation_mean", report.propagation_mean),
        ("propagation_max", report.propagation_max),
        ("propagation_samples", report.propagation_samples),
        ("tx_total", len(report.tx_records)),
        ("tx_confirmed", sum(1 for t in report.tx_records if t.confirmed is not None)),
    ]
    stats = dominance_stats(report)
    for node in sorted(report.mined):
        pairs.append((f"mined.{node}", report.mined[node]))
        pairs.append((f"main.{node}", report.main_counts[node]))
        pairs.append((f"share.{node}", stats[node]["share"]))
        pairs.append((f"stale_fraction.{node}", stats[node]["stale_fraction"]))
    if extras:
        pairs.extend(extras)
    return pairs


def write_summary(pairs, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in pairs:
            fh.write(f"{key} = {_fmt(value)}\n")


def format_pairs(pairs, style: str = "table") -> str:
    """Render pairs for stdout: aligned table, `csv`, or `json-lines`."""
    if style == "table":
        width = max((len(k) for k, _ in pairs), default=0)
        return "\n".join(f"{k:<{width}}  {_fmt(v)}" for k, v in pairs)
    if style == "csv":
        lines = ["key,value"]
        lines += [f"{k},{_fmt(v)}" for k, v in pairs]
        return "\n".join(lines)
    if style == "json-lines":
        return "\n".join(json.dumps({"key": k, "value": v}, sort_keys=True) for k, v in pairs)
    raise ValueError(f"unknown format {style!r}")


def write_blocks_csv(report: SimReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "parent", "miner", "time", "height", "on_main_chain"])
        for b in report.blocks:
            writer.writerow(
                [
                    b.id,
                    "" if b.parent is None else b.parent,
                    b.miner,
                    repr(b.timestamp),
                    b.height,
                    int(b.id in report.main_chain),
                ]
            )


def write_txs_csv(report: SimReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "created", "confirmed", "latency"])
        for t in report.tx_records:
            writer.writerow(
                [
                    t.id,
                    repr(t.created),
                    "" if t.confirmed is None else repr(t.confirmed),
                    "" if t.latency is None else repr(t.latency),
                ]
            )


def write_sweep_csv(reports: list[SimReport], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["seed", "height", "total_mined", "orphan_rate", "fork_count", "propagation_mean"]
        )
        for r in reports:
            writer.writerow(
                [
                    r.seed,
                    r.height,
                    r.total_mined,
                    repr(r.orphan_rate),
                    r.fork_count,
                    "" if r.propagation_mean is None else repr(r.propagation_mean),
                ]
            )


def fig_blocks_timeline(report: SimReport, path) -> None:
    """Block arrival times against chain height; orphans marked separately."""
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    main = [b for b in report.blocks if b.id in report.main_chain]
    orphans = [b for b in report.blocks if b.id not in report.main_chain]
    ax.plot(
        [b.timestamp for b in main],
        [b.height for b in main],
        ".",
        markersize=3,
        color="tab:blue",
        label="main chain",
    )
    if orphans:
        ax.plot(
            [b.timestamp for b in orphans],
            [b.height for b in orphans],
            "x",
            markersize=4,
            color="tab:red",
            label="orphaned",
        )
    ax.set_xlabel("coordinate time (s)")
    ax.set_ylabel("height")
    ax.set_title("chain growth")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def fig_dominance(report: SimReport, path) -> None:
    """Per-node stacked bars: main-chain blocks and own orphaned blocks."""
    nodes = sorted(report.mined)
    main = [report.main_counts[n] for n in nodes]
    stale = [report.mined[n] - report.main_counts[n] for n in nodes]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(nodes) + 2.0), 4.0))
    xs = range(len(nodes))
    ax.bar(xs, main, color="tab:blue", label="on main chain")
    ax.bar(xs, stale, bottom=main, color="tab:red", label="orphaned")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(nodes, rotation=45, ha="right")
    ax.set_ylabel("blocks mined")
    ax.set_title("mining dominance")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def fig_latency_hist(report: SimReport, path) -> bool:
    """Histogram of confirmation latencies. Returns False (and writes
    nothing) when no transaction confirmed."""
    latencies = [t.latency for t in report.tx_records if t.latency is not None]
    if not latencies:
        return False
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(latencies, bins=min(30, max(5, len(latencies))), color="tab:blue")
    ax.set_xlabel("confirmation latency (s)")
    ax.set_ylabel("transactions")
    ax.set_title("confirmation latency")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return True
