"""Line-oriented scenario files (.scn).

A file is a sequence of [section] stanzas holding either `key = value` pairs
or whitespace-separated rows. Dimensioned values carry explicit unit
suffixes, normalized to SI on parse: durations `s`/`min`, lengths `m`/`ls`
(light-second)/`lmin`, velocities bare m/s or a `c` multiple. Sections:

  [topology]    kind = explicit-graph | satellite | concentric |
                       separate-systems | lattice, plus kind parameters
  [nodes]       explicit-graph: `<id> [static <x> <y> <z>] [attr=...]`
                generated kinds: `<id> attr=...` overrides only
                (attrs: hashpower=<float> region=<name> velocity=<speed>)
  [edges]       explicit-graph only: `<a> <b> <one-way delay>`
  [simulation]  blocktime, duration, seed
  [workload]    `<txid> at=<time> from=<node> to=<node>`
  [censorship]  `<node> <region> [<region> ...]`
  [planner]     max_confirmation

`#` starts a comment. Diagnostics carry the source name and line number.
Unknown sections, keys, and attributes are rejected rather than ignored.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from importlib import resources

from .relkin import SPEED_OF_LIGHT
from .simcore import Scenario, TxSpec
from .topo import CircularOrbit, LatencyGraph, NodeSpec, StaticPoint, build_lattice

_C = SPEED_OF_LIGHT

_SECTIONS = ("topology", "nodes", "edges", "simulation", "workload", "censorship", "planner")

_KINDS = ("explicit-graph", "satellite", "concentric", "separate-systems", "lattice")

_TOPOLOGY_KEYS = {
    "explicit-graph": frozenset(),
    "satellite": frozenset({"r1"}),
    "concentric": frozenset({"radii", "periods", "phases"}),
    "separate-systems": frozenset({"r1", "alpha", "r2", "period1", "period2", "phase1", "phase2"}),
    "lattice": frozenset({"l", "w", "h", "edge_delay"}),
}

_NODE_ATTRS = frozenset({"hashpower", "region", "velocity"})

_NAME_RE = re.compile(r"^[A-Za-z0-9_.\-]+$")
_NUM_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)([A-Za-z/]*)$")


class ScenarioError(ValueError):
    """Parse or validation failure, addressed to a source line when known."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = source or "<scenario>"
        if line is not None:
            where += f", line {line}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.source = source


@dataclass(frozen=True)
class ScenarioDoc:
    """Parsed scenario file: the built graph plus every stanza, SI-normalized.
    blocktime/duration/seed stay None when absent so the CLI can supply them."""

    kind: str
    topology_params: dict
    graph: LatencyGraph
    blocktime: float | None
    duration: float | None
    seed: int | None
    node_velocities: dict[str, float]
    tx_workload: tuple[TxSpec, ...]
    censorship: dict[str, frozenset[str]]
    max_confirmation: float | None
    source: str | None = field(default=None, compare=False)

    def to_scenario(
        self,
        blocktime: float | None = None,
        duration: float | None = None,
        seed: int | None = None,
    ) -> Scenario:
        """Materialize a runnable Scenario; arguments override file values."""
        b = blocktime if blocktime is not None else self.blocktime
        d = duration if duration is not None else self.duration
        s = seed if seed is not None else self.seed
        if b is None:
            raise ScenarioError(
                "no blocktime: set [simulation] blocktime or pass --blocktime", source=self.source
            )
        if d is None:
            raise ScenarioError(
                "no duration: set [simulation] duration or pass --duration", source=self.source
            )
        return Scenario(
            graph=self.graph,
            blocktime=b,
            duration=d,
            seed=s if s is not None else 0,
            node_velocities=dict(self.node_velocities),
            tx_workload=self.tx_workload,
            censorship=dict(self.censorship),
        )


def _quantity(tok: str) -> tuple[float, str]:
    m = _NUM_RE.match(tok)
    if m is None:
        raise ValueError(f"expected a number, got {tok!r}")
    return float(m.group(1)), m.group(2)


def _duration(tok: str) -> float:
    value, unit = _quantity(tok)
    if unit == "s":
        return value
    if unit == "min":
        return value * 60.0
    if unit == "":
        raise ValueError(f"duration {tok!r} needs a unit suffix (s or min)")
    raise ValueError(f"unknown duration unit {unit!r} in {tok!r}")


def _length(tok: str) -> float:
    value, unit = _quantity(tok)
    if unit == "m":
        return value
    if unit == "ls":
        return value * _C
    if unit == "lmin":
        return value * 60.0 * _C
    if unit == "":
        raise ValueError(f"length {tok!r} needs a unit suffix (m, ls, or lmin)")
    raise ValueError(f"unknown length unit {unit!r} in {tok!r}")


def _velocity(tok: str) -> float:
    value, unit = _quantity(tok)
    if unit in ("", "m/s"):
        return value
    if unit == "c":
        return value * _C
    raise ValueError(f"unknown velocity unit {unit!r} in {tok!r} (use m/s or c)")


def _bare_float(tok: str) -> float:
    value, unit = _quantity(tok)
    if unit:
        raise ValueError(f"expected a bare number, got {tok!r}")
    return value


def _bare_int(tok: str) -> int:
    try:
        return int(tok, 10)
    except ValueError:
        raise ValueError(f"expected an integer, got {tok!r}") from None


def _name(tok: str, what: str) -> str:
    if not _NAME_RE.match(tok):
        raise ValueError(f"invalid {what} {tok!r} (use letters, digits, _ . -)")
    return tok


def _split_sections(text: str, source: str) -> dict[str, list[tuple[int, str]]]:
    sections: dict[str, list[tuple[int, str]]] = {}
    current: list[tuple[int, str]] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ScenarioError(f"malformed section header {line!r}", lineno, source)
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise ScenarioError(
                    f"unknown section [{name}] (expected one of {', '.join(_SECTIONS)})",
                    lineno,
                    source,
                )
            if name in sections:
                raise ScenarioError(f"duplicate section [{name}]", lineno, source)
            current = sections.setdefault(name, [])
            continue
        if current is None:
            raise ScenarioError("content before any [section] header", lineno, source)
        current.append((lineno, line))
    return sections


def _parse_kv(rows: list[tuple[int, str]], section: str, source: str) -> dict[str, tuple[int, str]]:
    out: dict[str, tuple[int, str]] = {}
    for lineno, line in rows:
        key, eq, value = (part.strip() for part in line.partition("="))
        if not eq or not key or not value:
            raise ScenarioError(f"expected `key = value` in [{section}], got {line!r}", lineno, source)
        if key in out:
            raise ScenarioError(f"duplicate key {key!r} in [{section}]", lineno, source)
        out[key] = (lineno, value)
    return out


def _parse_attrs(tokens: list[str], lineno: int, source: str) -> dict[str, object]:
    attrs: dict[str, object] = {}
    for tok in tokens:
        key, eq, value = tok.partition("=")
        if not eq:
            raise ScenarioError(f"expected attr=value, got {tok!r}", lineno, source)
        if key not in _NODE_ATTRS:
            raise ScenarioError(
                f"unknown node attribute {key!r} (expected one of {', '.join(sorted(_NODE_ATTRS))})",
                lineno,
                source,
            )
        if key in attrs:
            raise ScenarioError(f"duplicate attribute {key!r}", lineno, source)
        try:
            if key == "hashpower":
                attrs[key] = _bare_float(value)
            elif key == "velocity":
                attrs[key] = _velocity(value)
            else:
                attrs[key] = _name(value, "region")
        except ValueError as exc:
            raise ScenarioError(str(exc), lineno, source) from None
    return attrs


def _comma_list(value: str, parse, lineno: int, source: str) -> tuple:
    items = [p.strip() for p in value.split(",")]
    if any(not p for p in items):
        raise ScenarioError(f"empty entry in list {value!r}", lineno, source)
    try:
        return tuple(parse(p) for p in items)
    except ValueError as exc:
        raise ScenarioError(str(exc), lineno, source) from None


def _topology(kv: dict[str, tuple[int, str]], source: str) -> tuple[str, dict]:
    if "kind" not in kv:
        raise ScenarioError("[topology] must set kind", source=source)
    lineno, kind = kv.pop("kind")
    if kind not in _KINDS:
        raise ScenarioError(f"unknown topology kind {kind!r} (expected one of {', '.join(_KINDS)})", lineno, source)
    allowed = _TOPOLOGY_KEYS[kind]
    params: dict = {}
    for key, (lineno, value) in kv.items():
        if key not in allowed:
            raise ScenarioError(f"key {key!r} is not valid for kind {kind!r}", lineno, source)
        try:
            if key in ("r1", "alpha", "r2", "edge_delay", "period1", "period2"):
                params[key] = _duration(value)
            elif key in ("phase1", "phase2"):
                params[key] = _bare_float(value)
            elif key in ("radii", "periods"):
                params[key] = _comma_list(value, _duration, lineno, source)
            elif key == "phases":
                params[key] = _comma_list(value, _bare_float, lineno, source)
            else:  # l, w, h
                params[key] = _bare_int(value)
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(str(exc), lineno, source) from None
    required = {
        "satellite": {"r1"},
        "concentric": {"radii"},
        "separate-systems": {"r1", "alpha", "r2"},
        "lattice": {"l", "w", "h", "edge_delay"},
        "explicit-graph": set(),
    }[kind]
    missing = sorted(required - params.keys())
    if missing:
        raise ScenarioError(f"kind {kind!r} requires {', '.join(missing)}", source=source)
    return kind, params


def _orbit_or_point(radius_s: float, period_s: float, phase: float) -> StaticPoint | CircularOrbit:
    r_m = radius_s * _C
    if period_s == 0.0:
        return StaticPoint((r_m * math.cos(phase), r_m * math.sin(phase), 0.0))
    return CircularOrbit(
        center=(0.0, 0.0, 0.0),
        radius=r_m,
        angular_velocity=2.0 * math.pi / period_s,
        phase=phase,
    )


def _build_graph(kind: str, params: dict, source: str) -> LatencyGraph:
    if kind == "satellite":
        r1 = params["r1"]
        nodes = (
            NodeSpec("planet", StaticPoint((0.0, 0.0, 0.0))),
            NodeSpec("satellite", StaticPoint((r1 * _C, 0.0, 0.0))),
        )
        return LatencyGraph(nodes=nodes, edges=(("planet", "satellite", r1),))
    if kind == "concentric":
        radii = params["radii"]
        if len(radii) < 2:
            raise ScenarioError("concentric needs at least 2 radii", source=source)
        periods = params.get("periods", (0.0,) * len(radii))
        phases = params.get("phases", (0.0,) * len(radii))
        if len(periods) != len(radii) or len(phases) != len(radii):
            raise ScenarioError("radii, periods, and phases must have equal lengths", source=source)
        nodes = tuple(
            NodeSpec(f"p{i}", _orbit_or_point(r, t, ph))
            for i, (r, t, ph) in enumerate(zip(radii, periods, phases), start=1)
        )
        return LatencyGraph(nodes=nodes, edges=None)
    if kind == "separate-systems":
        r1, alpha, r2 = params["r1"], params["alpha"], params["r2"]
        m1 = _orbit_or_point(r1, params.get("period1", 0.0), params.get("phase1", 0.0))
        m2 = _orbit_or_point(r2, params.get("period2", 0.0), params.get("phase2", 0.0))
        offset = alpha * _C
        if isinstance(m2, StaticPoint):
            x, y, z = m2.position
            m2 = StaticPoint((x + offset, y, z))
        else:
            m2 = replace(m2, center=(offset, 0.0, 0.0))
        return LatencyGraph(nodes=(NodeSpec("p1", m1), NodeSpec("p2", m2)), edges=None)
    if kind == "lattice":
        return build_lattice(params["l"], params["w"], params["h"], params["edge_delay"])
    raise ValueError(f"kind {kind!r} has no generated topology")


def _explicit_nodes(rows: list[tuple[int, str]], source: str) -> tuple[tuple[NodeSpec, ...], dict[str, float]]:
    nodes: list[NodeSpec] = []
    seen: set[str] = set()
    velocities: dict[str, float] = {}
    for lineno, line in rows:
        tokens = line.split()
        try:
            node_id = _name(tokens[0], "node id")
        except ValueError as exc:
            raise ScenarioError(str(exc), lineno, source) from None
        if node_id in seen:
            raise ScenarioError(f"duplicate node {node_id!r}", lineno, source)
        seen.add(node_id)
        rest = tokens[1:]
        motion: StaticPoint
        if rest and rest[0] == "static":
            if len(rest) < 4:
                raise ScenarioError("static motion needs 3 coordinates", lineno, source)
            try:
                motion = StaticPoint((_length(rest[1]), _length(rest[2]), _length(rest[3])))
            except ValueError as exc:
                raise ScenarioError(str(exc), lineno, source) from None
            rest = rest[4:]
        else:
            motion = StaticPoint((0.0, 0.0, 0.0))
        attrs = _parse_attrs(rest, lineno, source)
        if "velocity" in attrs:
            velocities[node_id] = attrs.pop("velocity")
        nodes.append(NodeSpec(node_id, motion, **attrs))
    return tuple(nodes), velocities


def _override_nodes(
    graph: LatencyGraph, rows: list[tuple[int, str]], source: str
) -> tuple[LatencyGraph, dict[str, float]]:
    nodes = list(graph.nodes)
    index = {n.id: i for i, n in enumerate(nodes)}
    velocities: dict[str, float] = {}
    seen: set[str] = set()
    for lineno, line in rows:
        tokens = line.split()
        node_id = tokens[0]
        if node_id not in index:
            raise ScenarioError(f"node {node_id!r} does not exist in this topology", lineno, source)
        if node_id in seen:
            raise ScenarioError(f"duplicate override for node {node_id!r}", lineno, source)
        seen.add(node_id)
        attrs = _parse_attrs(tokens[1:], lineno, source)
        if "velocity" in attrs:
            velocities[node_id] = attrs.pop("velocity")
        if attrs:
            nodes[index[node_id]] = replace(nodes[index[node_id]], **attrs)
    if any(n is not g for n, g in zip(nodes, graph.nodes)):
        graph = replace(graph, nodes=tuple(nodes))
    return graph, velocities


def _explicit_edges(rows: list[tuple[int, str]], source: str) -> tuple[tuple[str, str, float], ...]:
    edges: list[tuple[str, str, float]] = []
    for lineno, line in rows:
        tokens = line.split()
        if len(tokens) != 3:
            raise ScenarioError(f"expected `<a> <b> <delay>`, got {line!r}", lineno, source)
        try:
            edges.append((tokens[0], tokens[1], _duration(tokens[2])))
        except ValueError as exc:
            raise ScenarioError(str(exc), lineno, source) from None
    return tuple(edges)


def _workload(rows: list[tuple[int, str]], node_ids: set[str], source: str) -> tuple[TxSpec, ...]:
    txs: list[TxSpec] = []
    seen: set[str] = set()
    for lineno, line in rows:
        tokens = line.split()
        try:
            txid = _name(tokens[0], "transaction id")
        except ValueError as exc:
            raise ScenarioError(str(exc), lineno, source) from None
        if txid in seen:
            raise ScenarioError(f"duplicate transaction id {txid!r}", lineno, source)
        seen.add(txid)
        fields = {}
        for tok in tokens[1:]:
            key, eq, value = tok.partition("=")
            if not eq or key not in ("at", "from", "to"):
                raise ScenarioError(f"expected at=/from=/to=, got {tok!r}", lineno, source)
            fields[key] = value
        missing = sorted({"at", "from", "to"} - fields.keys())
        if missing:
            raise ScenarioError(f"transaction {txid!r} missing {', '.join(missing)}", lineno, source)
        try:
            created = _duration(fields["at"])
        except ValueError as exc:
            raise ScenarioError(str(exc), lineno, source) from None
        for endpoint in ("from", "to"):
            if fields[endpoint] not in node_ids:
                raise ScenarioError(f"unknown node {fields[endpoint]!r} in {endpoint}=", lineno, source)
        txs.append(TxSpec(id=txid, created=created, origin=fields["from"], destination=fields["to"]))
    return tuple(txs)


def _censorship(
    rows: list[tuple[int, str]], node_ids: set[str], source: str
) -> dict[str, frozenset[str]]:
    out: dict[str, frozenset[str]] = {}
    for lineno, line in rows:
        tokens = line.split()
        if len(tokens) < 2:
            raise ScenarioError(f"expected `<node> <region> [...]`, got {line!r}", lineno, source)
        node_id = tokens[0]
        if node_id not in node_ids:
            raise ScenarioError(f"unknown node {node_id!r} in censorship entry", lineno, source)
        if node_id in out:
            raise ScenarioError(f"duplicate censorship entry for {node_id!r}", lineno, source)
        try:
            out[node_id] = frozenset(_name(t, "region") for t in tokens[1:])
        except ValueError as exc:
            raise ScenarioError(str(exc), lineno, source) from None
    return out


def loads(text: str, name: str = "<scenario>") -> ScenarioDoc:
    """Parse scenario text. Raises ScenarioError with a line-addressed
    diagnostic on any malformed or unknown content."""
    sections = _split_sections(text, name)
    if "topology" not in sections:
        raise ScenarioError("missing required [topology] section", source=name)
    kind, params = _topology(_parse_kv(sections["topology"], "topology", name), name)

    if kind == "explicit-graph":
        if "nodes" not in sections or not sections["nodes"]:
            raise ScenarioError("explicit-graph requires a [nodes] section", source=name)
        nodes, velocities = _explicit_nodes(sections["nodes"], name)
        edges = _explicit_edges(sections.get("edges", []), name)
        try:
            graph = LatencyGraph(nodes=nodes, edges=edges)
        except ValueError as exc:
            raise ScenarioError(str(exc), source=name) from None
    else:
        if "edges" in sections:
            raise ScenarioError(f"[edges] is only valid for explicit-graph, not {kind!r}", source=name)
        try:
            graph = _build_graph(kind, params, name)
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(str(exc), source=name) from None
        graph, velocities = _override_nodes(graph, sections.get("nodes", []), name)

    blocktime = duration = None
    seed = None
    if "simulation" in sections:
        kv = _parse_kv(sections["simulation"], "simulation", name)
        for key, (lineno, value) in kv.items():
            try:
                if key == "blocktime":
                    blocktime = _duration(value)
                elif key == "duration":
                    duration = _duration(value)
                elif key == "seed":
                    seed = _bare_int(value)
                else:
                    raise ValueError(f"unknown [simulation] key {key!r}")
            except ValueError as exc:
                raise ScenarioError(str(exc), lineno, source=name) from None

    max_confirmation = None
    if "planner" in sections:
        kv = _parse_kv(sections["planner"], "planner", name)
        for key, (lineno, value) in kv.items():
            if key != "max_confirmation":
                raise ScenarioError(f"unknown [planner] key {key!r}", lineno, source=name)
            try:
                max_confirmation = _duration(value)
            except ValueError as exc:
                raise ScenarioError(str(exc), lineno, source=name) from None

    node_ids = {n.id for n in graph.nodes}
    workload = _workload(sections.get("workload", []), node_ids, name)
    censorship = _censorship(sections.get("censorship", []), node_ids, name)

    return ScenarioDoc(
        kind=kind,
        topology_params=params,
        graph=graph,
        blocktime=blocktime,
        duration=duration,
        seed=seed,
        node_velocities=velocities,
        tx_workload=workload,
        censorship=censorship,
        max_confirmation=max_confirmation,
        source=name,
    )


def load(path) -> ScenarioDoc:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read(), name=str(path))


def _fmt_seconds(value: float) -> str:
    return f"{value!r}s"


def _node_attr_tokens(node: NodeSpec, velocity: float | None, always: bool) -> list[str]:
    tokens = []
    if always or node.hashpower != 1.0:
        tokens.append(f"hashpower={node.hashpower!r}")
    if node.region:
        tokens.append(f"region={node.region}")
    if velocity is not None:
        tokens.append(f"velocity={velocity!r}m/s")
    return tokens


def dumps(doc: ScenarioDoc) -> str:
    """Serialize back to scenario text. Values are written in SI units with
    full float precision, so loads(dumps(doc)) compares equal to doc."""
    lines = ["[topology]", f"kind = {doc.kind}"]
    p = doc.topology_params
    if doc.kind == "satellite":
        lines.append(f"r1 = {_fmt_seconds(p['r1'])}")
    elif doc.kind == "concentric":
        lines.append("radii = " + ", ".join(_fmt_seconds(r) for r in p["radii"]))
        if "periods" in p:
            lines.append("periods = " + ", ".join(_fmt_seconds(t) for t in p["periods"]))
        if "phases" in p:
            lines.append("phases = " + ", ".join(repr(ph) for ph in p["phases"]))
    elif doc.kind == "separate-systems":
        for key in ("r1", "alpha", "r2", "period1", "period2"):
            if key in p:
                lines.append(f"{key} = {_fmt_seconds(p[key])}")
        for key in ("phase1", "phase2"):
            if key in p:
                lines.append(f"{key} = {p[key]!r}")
    elif doc.kind == "lattice":
        for key in ("l", "w", "h"):
            lines.append(f"{key} = {p[key]}")
        lines.append(f"edge_delay = {_fmt_seconds(p['edge_delay'])}")

    node_lines = []
    for node in doc.graph.nodes:
        velocity = doc.node_velocities.get(node.id)
        if doc.kind == "explicit-graph":
            x, y, z = node.motion.position
            row = [node.id, "static", f"{x!r}m", f"{y!r}m", f"{z!r}m"]
            row += _node_attr_tokens(node, velocity, always=True)
            node_lines.append(" ".join(row))
        else:
            tokens = _node_attr_tokens(node, velocity, always=False)
            if tokens:
                node_lines.append(" ".join([node.id] + tokens))
    if node_lines:
        lines += ["", "[nodes]"] + node_lines

    if doc.kind == "explicit-graph" and doc.graph.edges:
        lines += ["", "[edges]"]
        lines += [f"{a} {b} {_fmt_seconds(w)}" for a, b, w in doc.graph.edges]

    sim_lines = []
    if doc.blocktime is not None:
        sim_lines.append(f"blocktime = {_fmt_seconds(doc.blocktime)}")
    if doc.duration is not None:
        sim_lines.append(f"duration = {_fmt_seconds(doc.duration)}")
    if doc.seed is not None:
        sim_lines.append(f"seed = {doc.seed}")
    if sim_lines:
        lines += ["", "[simulation]"] + sim_lines

    if doc.tx_workload:
        lines += ["", "[workload]"]
        lines += [
            f"{tx.id} at={_fmt_seconds(tx.created)} from={tx.origin} to={tx.destination}"
            for tx in doc.tx_workload
        ]

    if doc.censorship:
        lines += ["", "[censorship]"]
        lines += [
            f"{node} " + " ".join(sorted(doc.censorship[node]))
            for node in sorted(doc.censorship)
        ]

    if doc.max_confirmation is not None:
        lines += ["", "[planner]", f"max_confirmation = {_fmt_seconds(doc.max_confirmation)}"]
    return "\n".join(lines) + "\n"


def bundled_names() -> list[str]:
    """Names of the scenario files shipped inside the package."""
    root = resources.files(__package__) / "scenarios"
    return sorted(entry.name[:-4] for entry in root.iterdir() if entry.name.endswith(".scn"))


def load_bundled(name: str) -> ScenarioDoc:
    fname = name if name.endswith(".scn") else name + ".scn"
    res = resources.files(__package__) / "scenarios" / fname
    if not res.is_file():
        raise ScenarioError(
            f"no bundled scenario {name!r} (available: {', '.join(bundled_names())})"
        )
    return loads(res.read_text(encoding="utf-8"), name=f"bundled:{fname}")
