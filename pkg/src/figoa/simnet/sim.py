"""Deterministic discrete-event simulation of a FIGOA network.

Links serialise packets at ``bytes * 8 / bandwidth``. Background traffic is
modelled as ``flows - 1`` foreign packets of the same size slotted in after
each of ours, so a link that just sent one of our packets stays busy for
``flows`` packet-times. That is exactly the round-robin arithmetic of the
closed-form model in :mod:`figoa.simnet.model`.
"""

from __future__ import annotations

import csv
import hashlib
import heapq
import io
import itertools
import random
from dataclasses import dataclass, field, replace

from .. import crypto, hashstate
from ..errors import WireError
from ..forwarder import Consumer, Node, Outcome
from ..name import Name
from ..wire import ContentFragment, ContentObject, decode, encode, encode_signable
from .topology import SimTopology

TRACE_HEADER = ("time", "node", "kind", "name", "offset", "size", "face")


@dataclass(frozen=True)
class TraceEvent:
    time: float
    node: str
    kind: str
    name: str = ""
    offset: int | None = None
    size: int | None = None
    face: str = ""

    def row(self) -> list[str]:
        return [
            f"{self.time:.9f}",
            self.node,
            self.kind,
            self.name,
            "" if self.offset is None else str(self.offset),
            "" if self.size is None else str(self.size),
            self.face,
        ]


class SimTrace(list):
    """Time-ordered list of :class:`TraceEvent`."""

    def of_kind(self, *kinds: str) -> list[TraceEvent]:
        return [e for e in self if e.kind in kinds]

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for e in self:
            w.writerow(e.row())

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


@dataclass
class SimResult:
    trace: SimTrace
    outcomes: dict[str, list[Outcome]] = field(default_factory=dict)

    def content_latency(self, consumer: str, index: int = 0) -> float | None:
        """Time from the source starting to send the content to the consumer accepting it."""
        o = self.outcomes[consumer][index]
        if o.status != "accept":
            return None
        name = str(o.name)
        starts = [e.time for e in self.trace if e.kind == "fragment" and e.name == name and e.time >= o.requested_at]
        return o.finished_at - min(starts) if starts else None


def producer_keypair(node_id: str) -> crypto.KeyPair:
    return crypto.generate_keypair(crypto.ED25519, hashlib.sha256(b"figoa-sim-key:" + node_id.encode()).digest())


def producer_key_name(node_id: str) -> Name:
    return Name((node_id.encode(), b"KEY"))


def make_content(name: Name, payload: bytes, keypair: crypto.KeyPair, key_locator: crypto.KeyLocator) -> ContentObject:
    """Sign ``payload`` under ``name``."""
    region = encode_signable(name, key_locator, payload)
    digest = hashstate.finalize(hashstate.new_state(), region, len(region))
    return ContentObject(name, key_locator, payload, crypto.sign_digest(keypair, digest))


@dataclass
class _LinkDir:
    latency: float
    bandwidth: float
    flows: int
    jitter: float
    corrupt: float
    next_free: float = 0.0


class Simulator:
    def __init__(self, topology: SimTopology, seed: int = 0):
        topology.validate()
        self.topology = topology
        self.seed = seed
        self.rng = random.Random(seed)
        self.trace = SimTrace()
        self._queue: list = []
        self._seq = itertools.count()

        keys = {}
        for spec in topology.nodes.values():
            if spec.role == "producer":
                keys[producer_key_name(spec.node_id)] = producer_keypair(spec.node_id).public_key
        self.registry = crypto.KeyRegistry(keys)

        self.links: dict[tuple[str, str], _LinkDir] = {}
        for l in topology.links:
            for src, dst in ((l.a, l.b), (l.b, l.a)):
                self.links[(src, dst)] = _LinkDir(l.latency, l.bandwidth, l.flows, l.jitter, l.corrupt)

        self.nodes: dict[str, Node | Consumer] = {}
        self._delay: dict[str, float] = {}
        for spec in topology.nodes.values():
            node_rng = random.Random(f"{seed}:{spec.node_id}")
            if spec.role == "consumer":
                (face,) = topology.neighbours(spec.node_id)
                obj = Consumer(spec.node_id, face, self.registry, node_rng, timeout=spec.config.pit_lifetime)
            else:
                obj = Node(spec.node_id, replace(spec.config, faces={}), self.registry, node_rng)
                for nb in topology.neighbours(spec.node_id):
                    obj.add_face(nb, topology.link(spec.node_id, nb).mtu_from(spec.node_id))
                for prefix, face in spec.routes:
                    obj.add_route(prefix, face)
            obj.on_event = self._log
            self.nodes[spec.node_id] = obj
            self._delay[spec.node_id] = spec.processing_delay

        for spec in topology.nodes.values():
            if spec.role != "producer" or not spec.contents:
                continue
            kp = producer_keypair(spec.node_id)
            locator = crypto.KeyLocator.named(producer_key_name(spec.node_id))
            next_hops = topology.next_hops_towards(spec.node_id)
            for c in spec.contents:
                payload = random.Random(f"content:{c.seed}:{c.name}").randbytes(c.size)
                self.nodes[spec.node_id].produce(make_content(c.name, payload, kp, locator))
                for node_id, hop in next_hops.items():
                    node = self.nodes[node_id]
                    if isinstance(node, Node) and not topology.nodes[node_id].routes:
                        node.add_route(c.name, hop)

    # -- trace -------------------------------------------------------------

    def _log(self, now, node, kind, name=None, offset=None, size=None, face=None):
        self.trace.append(
            TraceEvent(now, str(node), kind, "" if name is None else str(name), offset, size, "" if face is None else str(face))
        )

    # -- scheduling --------------------------------------------------------

    def _push(self, t: float, kind: str, *args) -> None:
        heapq.heappush(self._queue, (t, next(self._seq), kind, args))

    def _dispatch(self, src: str, sends, now: float) -> None:
        t = now + self._delay[src]
        for face, packet in sends:
            link = self.links[(src, face)]
            data = encode(packet)
            start = max(t, link.next_free)
            duration = len(data) * 8 / link.bandwidth
            link.next_free = start + link.flows * duration
            if link.corrupt and isinstance(packet, ContentFragment) and self.rng.random() < link.corrupt:
                data = self._corrupt(packet)
            arrival = start + duration + link.latency
            if link.jitter:
                arrival += self.rng.random() * link.jitter
            self._push(start, "transmit", src, face, data, arrival)

    def _corrupt(self, cf: ContentFragment) -> bytes:
        payload = bytearray(cf.payload)
        bit = self.rng.randrange(len(payload) * 8)
        payload[bit // 8] ^= 1 << (bit % 8)
        return encode(ContentFragment(cf.name, cf.content_object_size, cf.internal_state, cf.payload_offset,
                                      cf.content_digest, bytes(payload), cf.trailer))

    def run(self, until: float | None = None) -> SimResult:
        for t, consumer, name in self.topology.workload:
            self._push(t, "request", consumer, name)
        while self._queue:
            t, _, kind, args = heapq.heappop(self._queue)
            if until is not None and t > until:
                break
            if kind == "request":
                consumer, name = args
                node = self.nodes[consumer]
                self._dispatch(consumer, node.express(name, t), t)
                self._push(t + node.timeout + 1e-9, "expire", consumer)
            elif kind == "expire":
                self.nodes[args[0]].expire(t)
            elif kind == "transmit":
                src, dst, data, arrival = args
                self._log_packet(t, src, "send", data, dst)
                self._push(arrival, "deliver", dst, src, data)
            elif kind == "deliver":
                dst, src, data = args
                self._log_packet(t, dst, "receive", data, src)
                try:
                    sends = self.nodes[dst].receive(data, src, t)
                except WireError:
                    self._log(t, dst, "drop", None, None, len(data), src)
                    continue
                self._dispatch(dst, sends, t)
        outcomes = {nid: list(n.outcomes) for nid, n in self.nodes.items() if isinstance(n, Consumer)}
        return SimResult(self.trace, outcomes)

    def _log_packet(self, t, node, kind, data, face):
        try:
            p = decode(data)
        except WireError:
            self._log(t, node, kind, None, None, len(data), face)
            return
        name = getattr(p, "name", None)
        offset = p.payload_offset if isinstance(p, ContentFragment) else None
        self._log(t, node, kind, name, offset, len(data), face)


def run(topology: SimTopology, workload=None, seed: int = 0, until: float | None = None) -> SimResult:
    """Simulate ``topology``; ``workload`` (list of (time, consumer, name)) overrides the topology's own."""
    if workload is not None:
        topology = SimTopology(topology.nodes, topology.links, sorted(workload, key=lambda w: w[0]))
    return Simulator(topology, seed).run(until)
