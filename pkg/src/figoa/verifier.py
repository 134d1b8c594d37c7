"""Incremental, order-independent verification of content fragments.

Every fragment claims the hash state at its start offset. Hashing its payload
from that claim gives a computed state at its end offset. Where a computed
and a claimed state meet at the same offset they must be equal. Once the
whole range is present every junction has been compared, so the chain ends
in the real digest of the reassembled bytes, which is then checked against
the advertised digest and (when a key resolves) the producer's signature.

The fragment carrying the final byte is the hostage: it is never released
until that last check passes.

Decisions are returned, not acted on; the caller does the sending.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass, field

from . import hashstate
from .crypto import KeyRegistry, resolve_key, verify_digest
from .errors import Incomplete, WireError
from .hashstate import BLOCK_SIZE, HashState
from .name import Name
from .wire import ContentFragment, ContentObject, decode_signable

DEFAULT_BUFFER_TIMEOUT = 4.0

ContentKey = tuple[Name, bytes]


# ---------------------------------------------------------------------------
# decisions


@dataclass(frozen=True)
class Forward:
    fragment: ContentFragment


@dataclass(frozen=True)
class HoldHostage:
    fragment: ContentFragment


@dataclass(frozen=True)
class AcceptComplete:
    content: ContentObject
    # fragments to send now, in offset order; the hostage is always last
    release: tuple[ContentFragment, ...]

    @property
    def hostage(self) -> ContentFragment:
        return self.release[-1]


@dataclass(frozen=True)
class Reject:
    reason: str
    key: ContentKey | None = None


@dataclass(frozen=True)
class DuplicateIgnored:
    fragment: ContentFragment


FragmentDecision = Forward | HoldHostage | AcceptComplete | Reject | DuplicateIgnored


# ---------------------------------------------------------------------------
# per-content state


class Status(enum.Enum):
    ACCUMULATING = "accumulating"
    REJECTED = "rejected"


@dataclass
class PendingContentBuffer:
    key: ContentKey
    total: int
    created_at: float
    segments: dict[int, ContentFragment] = field(default_factory=dict)
    claimed: dict[int, HashState] = field(default_factory=dict)
    computed: dict[int, HashState] = field(default_factory=dict)
    matched: set[int] = field(default_factory=set)
    hostage: ContentFragment | None = None
    status: Status = Status.ACCUMULATING
    received: int = 0
    _offsets: list[int] = field(default_factory=list, repr=False)

    @property
    def known_states(self) -> dict[int, tuple[HashState, str]]:
        """offset -> (state, origin) with origin one of claimed/computed/matched."""
        out = {v: (s, "claimed") for v, s in self.claimed.items()}
        for v, s in self.computed.items():
            out[v] = (s, "matched" if v in self.matched else "computed")
        return out

    @property
    def complete(self) -> bool:
        return self.status is Status.ACCUMULATING and self.received == self.total

    def ordered(self) -> list[ContentFragment]:
        return [self.segments[v] for v in self._offsets]

    def overlaps(self, start: int, end: int) -> bool:
        i = bisect.bisect_left(self._offsets, start)
        if i < len(self._offsets) and self._offsets[i] < end:
            return True
        if i > 0 and self.segments[self._offsets[i - 1]].end_offset > start:
            return True
        return False

    def insert(self, cf: ContentFragment) -> None:
        bisect.insort(self._offsets, cf.payload_offset)
        self.segments[cf.payload_offset] = cf
        self.received += len(cf.payload)
        if cf.is_last:
            self.hostage = cf

    def clear(self) -> None:
        self.segments.clear()
        self._offsets.clear()
        self.claimed.clear()
        self.computed.clear()
        self.matched.clear()
        self.hostage = None
        self.received = 0


class BufferTable:
    """All pending content buffers of one node.

    ``registry`` resolves key-name locators. With ``verify_signatures`` off
    only the digest is checked. ``require_signature`` (consumers) rejects
    content whose key cannot be resolved instead of falling back to the
    digest check.
    """

    def __init__(
        self,
        registry: KeyRegistry | None = None,
        verify_signatures: bool = True,
        require_signature: bool = False,
    ):
        self.registry = registry
        self.verify_signatures = verify_signatures
        self.require_signature = require_signature
        self.buffers: dict[ContentKey, PendingContentBuffer] = {}

    def __len__(self):
        return len(self.buffers)

    def __contains__(self, key):
        return key in self.buffers

    def get(self, key: ContentKey) -> PendingContentBuffer | None:
        return self.buffers.get(key)

    def find(self, name: Name) -> list[PendingContentBuffer]:
        return [b for k, b in self.buffers.items() if k[0] == name]

    def discard(self, key: ContentKey) -> None:
        self.buffers.pop(key, None)

    def on_fragment(self, cf: ContentFragment, now: float = 0.0) -> FragmentDecision:
        return on_fragment(self, cf, now)


def _reject(buf: PendingContentBuffer, reason: str) -> Reject:
    # keep a tombstone so late fragments of this content are refused too
    buf.clear()
    buf.status = Status.REJECTED
    return Reject(reason, buf.key)


def on_fragment(table: BufferTable, cf: ContentFragment, now: float = 0.0) -> FragmentDecision:
    key = (cf.name, cf.content_digest)
    buf = table.buffers.get(key)
    if buf is None:
        buf = PendingContentBuffer(key=key, total=cf.content_object_size, created_at=now)
        table.buffers[key] = buf
    elif buf.status is Status.REJECTED:
        return Reject("content already rejected", key)

    v, end = cf.payload_offset, cf.end_offset
    if cf.content_object_size != buf.total:
        return _reject(buf, f"fragment at {v} says the object is {cf.content_object_size} bytes, buffer has {buf.total}")

    existing = buf.segments.get(v)
    if existing is not None:
        if existing == cf:
            return DuplicateIgnored(cf)
        return _reject(buf, f"conflicting fragment at offset {v}")
    if buf.overlaps(v, end):
        return _reject(buf, f"fragment [{v}, {end}) overlaps received data")

    claimed = cf.internal_state
    if v == 0 and claimed != hashstate.new_state():
        return _reject(buf, "first fragment does not start from the initialization vector")
    if v in buf.computed:
        if buf.computed[v] != claimed:
            return _reject(buf, f"state claimed at {v} differs from the state computed by its predecessor")
        buf.matched.add(v)

    payload = cf.payload
    aligned = len(payload) - len(payload) % BLOCK_SIZE
    end_state = hashstate.advance(claimed, payload)
    if not cf.is_last and end in buf.claimed:
        if buf.claimed[end] != end_state:
            return _reject(buf, f"state computed at {end} differs from the state claimed by its successor")
        buf.matched.add(end)

    buf.claimed[v] = claimed
    buf.computed[v + aligned] = end_state
    buf.insert(cf)

    if not buf.complete:
        return HoldHostage(cf) if cf.is_last else Forward(cf)
    return _finish(table, buf, cf)


def assemble(buf: PendingContentBuffer) -> ContentObject:
    """Rebuild the content object from a fully covered buffer."""
    if not buf.complete or buf.hostage is None:
        raise Incomplete(f"{buf.received} of {buf.total} bytes received")
    region = b"".join(cf.payload for cf in buf.ordered())
    if len(region) != buf.total:
        raise Incomplete(f"segments cover {len(region)} of {buf.total} bytes")
    name, key_locator, payload = decode_signable(region)
    return ContentObject(name, key_locator, payload, buf.hostage.trailer.signature)


def _finish(table: BufferTable, buf: PendingContentBuffer, cf: ContentFragment) -> FragmentDecision:
    hostage = buf.hostage
    tail_start = len(hostage.payload) - len(hostage.payload) % BLOCK_SIZE
    digest = hashstate.finalize(
        buf.computed[hostage.payload_offset + tail_start], hostage.payload[tail_start:], buf.total
    )
    if digest != buf.key[1]:
        return _reject(buf, "reassembled digest does not match ContentDigest")
    try:
        co = assemble(buf)
    except (WireError, ValueError) as exc:
        return _reject(buf, f"reassembled bytes are not a valid signable region ({exc})")
    if co.name != buf.key[0]:
        return _reject(buf, "name inside the signed region differs from the fragment name")
    if co.key_locator != hostage.trailer.key_locator:
        return _reject(buf, "trailer key locator differs from the signed one")

    if table.verify_signatures or table.require_signature:
        key = resolve_key(table.registry, co.key_locator)
        if key is not None:
            if not verify_digest(key, digest, co.signature):
                return _reject(buf, "signature verification failed")
        elif table.require_signature:
            return _reject(buf, "no key available to verify the signature")

    del table.buffers[buf.key]
    release = (hostage,) if cf is hostage else (cf, hostage)
    return AcceptComplete(co, release)


def expire_buffers(table: BufferTable, now: float, timeout: float = DEFAULT_BUFFER_TIMEOUT) -> list[ContentKey]:
    """Drop buffers (and their hostages) older than ``timeout``; returns their keys."""
    if timeout <= 0:
        raise ValueError("timeout must be positive")
    stale = [k for k, b in table.buffers.items() if now - b.created_at > timeout]
    for k in stale:
        del table.buffers[k]
    return stale
