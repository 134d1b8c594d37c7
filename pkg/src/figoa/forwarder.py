"""NDN forwarding node: PIT, FIB, Content Store and the content fragment path.

A :class:`Node` is a plain state machine. Feed it one packet with
:meth:`Node.receive` and it returns the ``(face, packet)`` pairs to send.
Faces are opaque ids (the simulator uses neighbour node ids); each face has
the MTU of the outgoing link direction.

Content fragments either go cut-through (forwarded as soon as the verifier
accepts them, hostage held back) or are fully reassembled at every hop.
"""

from __future__ import annotations

import enum
import math
import random
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from typing import Callable, Hashable

from .crypto import KeyRegistry
from .errors import Incomplete, MtuTooSmall, NoRoute
from .fragmenter import fragment_content, refragment
from .name import Name
from .verifier import (
    DEFAULT_BUFFER_TIMEOUT,
    AcceptComplete,
    BufferTable,
    Forward,
    Reject,
    expire_buffers,
)
from .wire import (
    MIN_VIABLE_MTU,
    REASSEMBLY_ID_SIZE,
    TL_SIZE,
    ContentFragment,
    ContentObject,
    Interest,
    InterestFragment,
    Packet,
    decode,
    encode,
    encoded_size,
)

FaceId = Hashable
Send = tuple[FaceId, Packet]

DEFAULT_PIT_LIFETIME = 4.0
# ReassemblyId, Seq, Count and the data TL around the outer TL
INTEREST_FRAGMENT_HEADER = TL_SIZE + (TL_SIZE + REASSEMBLY_ID_SIZE) + (TL_SIZE + 2) + (TL_SIZE + 2) + TL_SIZE


class Mode(str, enum.Enum):
    CUT_THROUGH = "cut_through"
    HOP_BY_HOP = "hop_by_hop_reassembly"


@dataclass
class NodeConfig:
    mode: Mode = Mode.CUT_THROUGH
    verify_signatures: bool = True
    cs_capacity: int = 100
    buffer_timeout: float = DEFAULT_BUFFER_TIMEOUT
    pit_lifetime: float = DEFAULT_PIT_LIFETIME
    faces: dict = field(default_factory=dict)  # face id -> outgoing MTU

    def __post_init__(self):
        self.mode = Mode(self.mode)
        for face, mtu in self.faces.items():
            if mtu < MIN_VIABLE_MTU:
                raise MtuTooSmall(f"face {face!r} MTU {mtu} is below the minimum {MIN_VIABLE_MTU}")


@dataclass
class PitEntry:
    name: Name
    faces: dict  # arrival face -> muMTU stamped on the interest that came in on it
    created_at: float
    expiry: float
    sent: dict = field(default_factory=dict)  # face -> offsets already sent there (arrival form)


@dataclass(frozen=True)
class FibEntry:
    name_prefix: Name
    faces: tuple


class ContentStore:
    """LRU cache of verified content, keyed by (name, digest)."""

    def __init__(self, capacity: int = 100):
        self.capacity = capacity
        self._items: OrderedDict[tuple[Name, bytes], ContentObject] = OrderedDict()

    def __len__(self):
        return len(self._items)

    def __contains__(self, key):
        return key in self._items

    def insert(self, co: ContentObject) -> None:
        if self.capacity <= 0:
            return
        key = (co.name, co.content_digest)
        self._items[key] = co
        self._items.move_to_end(key)
        while len(self._items) > self.capacity:
            self._items.popitem(last=False)

    def lookup(self, name: Name, digest: bytes | None = None) -> ContentObject | None:
        if digest is not None:
            key = (name, digest)
            co = self._items.get(key)
        else:
            key, co = next(((k, c) for k, c in reversed(self._items.items()) if k[0] == name), (None, None))
        if co is not None:
            self._items.move_to_end(key)
        return co


# ---------------------------------------------------------------------------
# interest fragmentation


def fragment_interest(interest: Interest, mtu: int, reassembly_id: bytes | None = None) -> list[Packet]:
    """Split an interest that does not fit ``mtu``; one that fits passes through."""
    data = encode(interest)
    if len(data) <= mtu:
        return [interest]
    room = mtu - INTEREST_FRAGMENT_HEADER
    if room < 1:
        raise MtuTooSmall(f"MTU {mtu} cannot carry an interest fragment header ({INTEREST_FRAGMENT_HEADER} bytes)")
    count = math.ceil(len(data) / room)
    if count > 0xFFFF:
        raise MtuTooSmall(f"interest would need {count} fragments")
    rid = reassembly_id if reassembly_id is not None else random.randbytes(REASSEMBLY_ID_SIZE)
    return [InterestFragment(rid, i, count, data[i * room : (i + 1) * room]) for i in range(count)]


def reassemble_interest(fragments) -> Interest:
    frags = list(fragments)
    if not frags:
        raise Incomplete("no interest fragments")
    rid, count = frags[0].reassembly_id, frags[0].count
    by_seq = {}
    for f in frags:
        if f.reassembly_id != rid or f.count != count:
            raise ValueError("fragments belong to different interests")
        by_seq[f.seq] = f.payload
    missing = [i for i in range(count) if i not in by_seq]
    if missing:
        raise Incomplete(f"missing interest fragments {missing}")
    packet = decode(b"".join(by_seq[i] for i in range(count)))
    if not isinstance(packet, Interest):
        raise ValueError("reassembled packet is not an interest")
    return packet


@dataclass
class _PartialInterest:
    count: int
    created_at: float
    parts: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# the node


class Node:
    def __init__(
        self,
        node_id,
        config: NodeConfig | None = None,
        registry: KeyRegistry | None = None,
        rng: random.Random | None = None,
    ):
        self.node_id = node_id
        self.config = config or NodeConfig()
        self.registry = registry
        self.rng = rng or random.Random()
        self.pit: dict[Name, PitEntry] = {}
        self.fib: list[FibEntry] = []
        self.cs = ContentStore(self.config.cs_capacity)
        self.buffers = BufferTable(registry, verify_signatures=self.config.verify_signatures)
        self.produced: dict[Name, ContentObject] = {}
        self.partial_interests: dict[bytes, _PartialInterest] = {}
        # (now, kind, name, offset, size, face); the simulator hooks this for its trace
        self.on_event: Callable | None = None
        self.refragment_calls = 0

    # -- configuration -----------------------------------------------------

    def add_face(self, face, mtu: int) -> None:
        if mtu < MIN_VIABLE_MTU:
            raise MtuTooSmall(f"face {face!r} MTU {mtu} is below the minimum {MIN_VIABLE_MTU}")
        self.config.faces[face] = mtu

    def add_route(self, prefix: Name | str, face) -> None:
        prefix = Name.from_uri(prefix) if isinstance(prefix, str) else prefix
        for i, entry in enumerate(self.fib):
            if entry.name_prefix == prefix:
                if face not in entry.faces:
                    self.fib[i] = FibEntry(prefix, entry.faces + (face,))
                return
        self.fib.append(FibEntry(prefix, (face,)))

    def produce(self, co: ContentObject) -> None:
        self.produced[co.name] = co

    def mtu(self, face) -> int:
        return self.config.faces[face]

    def fib_lookup(self, name: Name) -> FibEntry | None:
        best = None
        for entry in self.fib:
            if entry.name_prefix.is_prefix_of(name) and (best is None or len(entry.name_prefix) > len(best.name_prefix)):
                best = entry
        return best

    def _event(self, now, kind, name=None, offset=None, size=None, face=None):
        if self.on_event is not None:
            self.on_event(now, self.node_id, kind, name, offset, size, face)

    # -- dispatch ----------------------------------------------------------

    def receive(self, packet: Packet | bytes, in_face, now: float = 0.0) -> list[Send]:
        if isinstance(packet, (bytes, bytearray, memoryview)):
            packet = decode(packet)
        self.expire(now)
        if isinstance(packet, Interest):
            return self.on_interest(packet, in_face, now)
        if isinstance(packet, InterestFragment):
            return self.on_interest_fragment(packet, in_face, now)
        if isinstance(packet, ContentFragment):
            return self.on_content_fragment(packet, in_face, now)
        self._event(now, "drop", getattr(packet, "name", None), face=in_face)
        return []

    def expire(self, now: float) -> None:
        for name in [n for n, e in self.pit.items() if e.expiry < now]:
            del self.pit[name]
            self._event(now, "pit_expire", name)
        for key in expire_buffers(self.buffers, now, self.config.buffer_timeout):
            self.pit.pop(key[0], None)
            self._event(now, "buffer_expire", key[0])
        for rid in [r for r, p in self.partial_interests.items() if now - p.created_at > self.config.buffer_timeout]:
            del self.partial_interests[rid]
            self._event(now, "drop", None, face=None)

    # -- interests ---------------------------------------------------------

    def on_interest_fragment(self, frag: InterestFragment, in_face, now: float) -> list[Send]:
        key = frag.reassembly_id
        partial = self.partial_interests.get(key)
        if partial is None:
            partial = self.partial_interests[key] = _PartialInterest(frag.count, now)
        if frag.count != partial.count:
            return []
        partial.parts[frag.seq] = frag
        if len(partial.parts) < partial.count:
            return []
        del self.partial_interests[key]
        try:
            interest = reassemble_interest(partial.parts.values())
        except (Incomplete, ValueError):
            self._event(now, "drop", face=in_face)
            return []
        return self.on_interest(interest, in_face, now)

    def on_interest(self, interest: Interest, in_face, now: float = 0.0) -> list[Send]:
        name = interest.name
        mu = self.mtu(in_face) if interest.mu_mtu is None else min(interest.mu_mtu, self.mtu(in_face))
        interest = replace(interest, mu_mtu=mu)
        self._event(now, "receive_interest", name, size=mu, face=in_face)

        entry = self.pit.get(name)
        if entry is not None:
            if in_face in entry.faces:
                return []
            entry.faces[in_face] = mu
            return self._late_collapse(entry, in_face, now)

        co = self.cs.lookup(name)
        if co is not None:
            self._event(now, "cache_hit", name, face=in_face)
            return self._serve(co, in_face, mu, now)
        co = self.produced.get(name)
        if co is not None:
            return self._serve(co, in_face, mu, now)

        try:
            out_face = self._route(name, in_face)
        except NoRoute:
            self._event(now, "drop", name, face=in_face)
            return []
        self.pit[name] = PitEntry(name, {in_face: mu}, now, now + self.config.pit_lifetime)
        self._event(now, "forward", name, face=out_face)
        return [(out_face, p) for p in fragment_interest(interest, self.mtu(out_face), self.rng.randbytes(REASSEMBLY_ID_SIZE))]

    def _route(self, name: Name, in_face):
        entry = self.fib_lookup(name)
        if entry is None:
            raise NoRoute(str(name))
        faces = [f for f in entry.faces if f != in_face]
        if not faces:
            raise NoRoute(str(name))
        return faces[0]

    def _serve(self, co: ContentObject, face, mu: int, now: float) -> list[Send]:
        frags = fragment_content(co, min(mu, self.mtu(face)))
        self._event(now, "fragment", co.name, size=len(frags), face=face)
        return [(face, f) for f in frags]

    # -- content -----------------------------------------------------------

    def _send_fragment(self, entry: PitEntry, cf: ContentFragment, face, now: float) -> list[Send]:
        sent = entry.sent.setdefault(face, set())
        if cf.payload_offset in sent:
            return []
        sent.add(cf.payload_offset)
        target = min(entry.faces[face], self.mtu(face))
        if encoded_size(cf) <= target:
            return [(face, cf)]
        pieces = refragment(cf, target)
        self.refragment_calls += 1
        self._event(now, "refragment", cf.name, cf.payload_offset, len(pieces), face)
        return [(face, p) for p in pieces]

    def _late_collapse(self, entry: PitEntry, face, now: float) -> list[Send]:
        # fragments already forwarded upstream of this collapse go out on the new face too
        if self.config.mode is not Mode.CUT_THROUGH:
            return []
        sends = []
        for buf in self.buffers.find(entry.name):
            for cf in buf.ordered():
                if not cf.is_last:
                    sends += self._send_fragment(entry, cf, face, now)
        return sends

    def on_content_fragment(self, cf: ContentFragment, in_face, now: float = 0.0) -> list[Send]:
        entry = self.pit.get(cf.name)
        if entry is None:
            self._event(now, "drop", cf.name, cf.payload_offset, len(cf.payload), in_face)
            return []
        decision = self.buffers.on_fragment(cf, now)

        if isinstance(decision, Reject):
            del self.pit[cf.name]
            self._event(now, "reject", cf.name, cf.payload_offset, len(cf.payload), in_face)
            return []

        if isinstance(decision, AcceptComplete):
            co = decision.content
            self.cs.insert(co)
            del self.pit[cf.name]
            self._event(now, "accept", co.name, size=len(co.signable_region))
            sends = []
            for face in entry.faces:
                if face == in_face:
                    continue
                if self.config.mode is Mode.CUT_THROUGH:
                    for f in decision.release:
                        sends += self._send_fragment(entry, f, face, now)
                else:
                    sends += [(face, f) for f in fragment_content(co, self.mtu(face))]
            return sends

        if isinstance(decision, Forward) and self.config.mode is Mode.CUT_THROUGH:
            sends = []
            for face in entry.faces:
                if face != in_face:
                    sends += self._send_fragment(entry, cf, face, now)
            return sends
        return []


# ---------------------------------------------------------------------------
# consumer endpoint


@dataclass
class Outcome:
    name: Name
    requested_at: float
    status: str = "pending"  # pending | accept | reject
    reason: str = ""
    finished_at: float | None = None
    content: ContentObject | None = None

    @property
    def completion_time(self) -> float | None:
        return None if self.finished_at is None else self.finished_at - self.requested_at


class Consumer:
    """Application endpoint on a single face; always requires a valid signature."""

    def __init__(self, node_id, face, registry: KeyRegistry | None = None, rng: random.Random | None = None,
                 timeout: float = DEFAULT_PIT_LIFETIME):
        self.node_id = node_id
        self.face = face
        self.rng = rng or random.Random()
        self.timeout = timeout
        self.buffers = BufferTable(registry, verify_signatures=True, require_signature=True)
        self.outcomes: list[Outcome] = []
        self.on_event: Callable | None = None

    def _event(self, now, kind, name=None, offset=None, size=None, face=None):
        if self.on_event is not None:
            self.on_event(now, self.node_id, kind, name, offset, size, face)

    def _pending(self, name):
        return next((o for o in self.outcomes if o.name == name and o.status == "pending"), None)

    def express(self, name: Name | str, now: float = 0.0) -> list[Send]:
        name = Name.from_uri(name) if isinstance(name, str) else name
        self.outcomes.append(Outcome(name, now))
        self._event(now, "request", name, face=self.face)
        return [(self.face, Interest(name, self.rng.randbytes(8)))]

    def receive(self, packet, in_face, now: float = 0.0) -> list[Send]:
        if isinstance(packet, (bytes, bytearray, memoryview)):
            packet = decode(packet)
        self.expire(now)
        if not isinstance(packet, ContentFragment):
            return []
        outcome = self._pending(packet.name)
        if outcome is None:
            self._event(now, "drop", packet.name, packet.payload_offset, len(packet.payload), in_face)
            return []
        decision = self.buffers.on_fragment(packet, now)
        if isinstance(decision, AcceptComplete):
            outcome.status, outcome.finished_at, outcome.content = "accept", now, decision.content
            self._event(now, "accept", packet.name, size=len(decision.content.signable_region))
        elif isinstance(decision, Reject):
            outcome.status, outcome.finished_at, outcome.reason = "reject", now, decision.reason
            self._event(now, "reject", packet.name, packet.payload_offset, len(packet.payload), in_face)
        return []

    def expire(self, now: float) -> None:
        for o in self.outcomes:
            if o.status == "pending" and now - o.requested_at > self.timeout:
                o.status, o.finished_at, o.reason = "reject", o.requested_at + self.timeout, "timeout: content incomplete"
                self._event(o.finished_at, "reject", o.name)
