"""Simulated network description and its text config format.

Config files are line oriented (see ``docs/config-format.md``)::

    [sim]
    mode = cut_through

    [node c]
    role = consumer

    [node r1]
    role = router

    [node p]
    role = producer
    content = /ndn/usa/cnn/frontpage/news 1024

    [link c r1]
    latency = 0.010
    bandwidth = 100e6
    mtu = 1500

    [link r1 p]
    latency = 0.010
    bandwidth = 100e6
    mtu = 1500

    [workload]
    0.0 c /ndn/usa/cnn/frontpage/news
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ..errors import InvalidTopology
from ..forwarder import Mode, NodeConfig
from ..name import Name
from ..wire import MIN_VIABLE_MTU

ROLES = ("consumer", "router", "producer")


@dataclass(frozen=True)
class ContentSpec:
    name: Name
    size: int  # application payload bytes
    seed: int = 0


@dataclass
class NodeSpec:
    node_id: str
    role: str = "router"
    config: NodeConfig = field(default_factory=NodeConfig)
    contents: list[ContentSpec] = field(default_factory=list)
    routes: list[tuple[Name, str]] = field(default_factory=list)
    processing_delay: float = 0.0

    def __post_init__(self):
        if self.role not in ROLES:
            raise InvalidTopology(f"node {self.node_id}: unknown role {self.role!r}")


@dataclass
class LinkSpec:
    a: str
    b: str
    latency: float
    bandwidth: float
    mtu_ab: int
    mtu_ba: int
    flows: int = 1
    jitter: float = 0.0  # extra uniform [0, jitter) delay per packet; reorders fragments
    corrupt: float = 0.0  # per content fragment probability of a payload bit flip

    def mtu_from(self, node: str) -> int:
        return self.mtu_ab if node == self.a else self.mtu_ba

    def other(self, node: str) -> str:
        return self.b if node == self.a else self.a


@dataclass
class SimTopology:
    nodes: dict[str, NodeSpec]
    links: list[LinkSpec]
    workload: list[tuple[float, str, Name]] = field(default_factory=list)

    def neighbours(self, node: str) -> list[str]:
        return [l.other(node) for l in self.links if node in (l.a, l.b)]

    def link(self, a: str, b: str) -> LinkSpec:
        for l in self.links:
            if (l.a, l.b) in ((a, b), (b, a)):
                return l
        raise KeyError((a, b))

    def validate(self) -> None:
        if not self.nodes:
            raise InvalidTopology("no nodes")
        seen = set()
        for l in self.links:
            for end in (l.a, l.b):
                if end not in self.nodes:
                    raise InvalidTopology(f"link {l.a}-{l.b} names unknown node {end}")
            if l.a == l.b:
                raise InvalidTopology(f"self-loop on {l.a}")
            pair = frozenset((l.a, l.b))
            if pair in seen:
                raise InvalidTopology(f"duplicate link {l.a}-{l.b}")
            seen.add(pair)
            if min(l.mtu_ab, l.mtu_ba) < MIN_VIABLE_MTU:
                raise InvalidTopology(f"link {l.a}-{l.b}: MTU below the minimum {MIN_VIABLE_MTU}")
            if l.latency < 0 or l.bandwidth <= 0 or l.flows < 1 or l.jitter < 0 or not 0 <= l.corrupt <= 1:
                raise InvalidTopology(f"link {l.a}-{l.b}: bad latency/bandwidth/flows/jitter/corrupt")
        start = next(iter(self.nodes))
        reached = {start}
        todo = deque([start])
        while todo:
            for n in self.neighbours(todo.popleft()):
                if n not in reached:
                    reached.add(n)
                    todo.append(n)
        if reached != set(self.nodes):
            raise InvalidTopology(f"not connected: {sorted(set(self.nodes) - reached)} unreachable")
        for spec in self.nodes.values():
            if spec.role == "consumer" and len(self.neighbours(spec.node_id)) != 1:
                raise InvalidTopology(f"consumer {spec.node_id} must have exactly one link")
        for t, consumer, _ in self.workload:
            if consumer not in self.nodes or self.nodes[consumer].role != "consumer":
                raise InvalidTopology(f"workload entry at {t} names non-consumer {consumer}")

    def next_hops_towards(self, target: str) -> dict[str, str]:
        """For every node, the neighbour on a shortest path to ``target``."""
        hops = {}
        todo = deque([target])
        seen = {target}
        while todo:
            n = todo.popleft()
            for m in sorted(self.neighbours(n)):
                if m not in seen:
                    seen.add(m)
                    hops[m] = n
                    todo.append(m)
        return hops


# ---------------------------------------------------------------------------
# text config

_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _parse_bool(value: str, where: str) -> bool:
    try:
        return _BOOL[value.lower()]
    except KeyError:
        raise InvalidTopology(f"{where}: expected a boolean, got {value!r}") from None


def _number(value: str, kind, where: str):
    try:
        return kind(float(value)) if kind is int else kind(value)
    except ValueError:
        raise InvalidTopology(f"{where}: expected a number, got {value!r}") from None


def parse_config(text: str) -> SimTopology:
    """Parse the ``key = value`` topology format. Raises :class:`InvalidTopology`."""
    defaults: dict[str, str] = {}
    node_items: dict[str, list[tuple[str, str, int]]] = {}
    link_items: list[tuple[str, str, list[tuple[str, str, int]]]] = []
    workload: list[tuple[float, str, Name]] = []
    section = None
    current: list | None = None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise InvalidTopology(f"line {lineno}: unterminated section header")
            head = line[1:-1].split()
            if not head:
                raise InvalidTopology(f"line {lineno}: empty section header")
            section = head[0]
            if section == "node" and len(head) == 2:
                current = node_items.setdefault(head[1], [])
            elif section == "link" and len(head) == 3:
                current = []
                link_items.append((head[1], head[2], current))
            elif section in ("sim", "workload") and len(head) == 1:
                current = None
            else:
                raise InvalidTopology(f"line {lineno}: bad section header {line!r}")
            continue
        if section is None:
            raise InvalidTopology(f"line {lineno}: content outside any section")
        if section == "workload":
            parts = line.split()
            if len(parts) != 3:
                raise InvalidTopology(f"line {lineno}: workload lines are '<time> <consumer> <name>'")
            workload.append((_number(parts[0], float, f"line {lineno}"), parts[1], Name.from_uri(parts[2])))
            continue
        if "=" not in line:
            raise InvalidTopology(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if section == "sim":
            defaults[key] = value
        else:
            current.append((key, value, lineno))

    nodes = {}
    for node_id, items in node_items.items():
        nodes[node_id] = _build_node(node_id, items, defaults)
    links = [_build_link(a, b, items, defaults) for a, b, items in link_items]
    topo = SimTopology(nodes, links, sorted(workload, key=lambda w: w[0]))
    topo.validate()
    return topo


def _build_node(node_id, items, defaults) -> NodeSpec:
    cfg = NodeConfig(mode=Mode(defaults.get("mode", Mode.CUT_THROUGH.value)))
    if "verify_signatures" in defaults:
        cfg.verify_signatures = _parse_bool(defaults["verify_signatures"], "[sim]")
    spec = NodeSpec(node_id, config=cfg)
    for key, value, lineno in items:
        where = f"line {lineno}"
        if key == "role":
            if value not in ROLES:
                raise InvalidTopology(f"{where}: unknown role {value!r}")
            spec.role = value
        elif key == "mode":
            try:
                cfg.mode = Mode(value)
            except ValueError:
                raise InvalidTopology(f"{where}: unknown mode {value!r}") from None
        elif key == "verify_signatures":
            cfg.verify_signatures = _parse_bool(value, where)
        elif key == "cs_capacity":
            cfg.cs_capacity = _number(value, int, where)
        elif key == "buffer_timeout":
            cfg.buffer_timeout = _number(value, float, where)
        elif key == "pit_lifetime":
            cfg.pit_lifetime = _number(value, float, where)
        elif key == "processing_delay":
            spec.processing_delay = _number(value, float, where)
        elif key == "content":
            parts = value.split()
            if len(parts) not in (2, 3):
                raise InvalidTopology(f"{where}: content = <name> <size> [seed]")
            seed = _number(parts[2], int, where) if len(parts) == 3 else 0
            spec.contents.append(ContentSpec(Name.from_uri(parts[0]), _number(parts[1], int, where), seed))
        elif key == "route":
            parts = value.split()
            if len(parts) != 2:
                raise InvalidTopology(f"{where}: route = <prefix> <neighbour>")
            spec.routes.append((Name.from_uri(parts[0]), parts[1]))
        else:
            raise InvalidTopology(f"{where}: unknown node key {key!r}")
    return spec


_LINK_KEYS = {"latency", "bandwidth", "mtu", "mtu_ab", "mtu_ba", "flows", "jitter", "corrupt"}


def _build_link(a, b, items, defaults) -> LinkSpec:
    values = {k: v for k, v in defaults.items() if k in _LINK_KEYS}
    for key, value, lineno in items:
        if key not in _LINK_KEYS:
            raise InvalidTopology(f"line {lineno}: unknown link key {key!r}")
        values[key] = value
    where = f"[link {a} {b}]"
    for required in ("latency", "bandwidth"):
        if required not in values:
            raise InvalidTopology(f"{where}: missing {required}")
    mtu = values.get("mtu")
    mtu_ab = values.get("mtu_ab", mtu)
    mtu_ba = values.get("mtu_ba", mtu)
    if mtu_ab is None or mtu_ba is None:
        raise InvalidTopology(f"{where}: missing mtu")
    return LinkSpec(
        a,
        b,
        latency=_number(values["latency"], float, where),
        bandwidth=_number(values["bandwidth"], float, where),
        mtu_ab=_number(mtu_ab, int, where),
        mtu_ba=_number(mtu_ba, int, where),
        flows=_number(values.get("flows", "1"), int, where),
        jitter=_number(values.get("jitter", "0"), float, where),
        corrupt=_number(values.get("corrupt", "0"), float, where),
    )


def load_config(path) -> SimTopology:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
