"""Packet types and their canonical TLV encoding.

Every element is ``type (1 byte) | length (4 bytes, big-endian) | value``.
Fields appear in one fixed order; the decoder rejects anything else, so
``encode(decode(b)) == b`` for every accepted ``b``. The layout is written
out field by field in ``docs/wire-format.md``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property
from typing import Union

from . import hashstate
from .crypto import KeyLocator, PublicKey, Signature
from .errors import BadStateEncoding, InvariantViolation, Truncated, UnknownType, UnsupportedScheme
from .hashstate import BLOCK_SIZE, DIGEST_SIZE, HashState
from .name import Name

# top-level packet types
T_INTEREST = 0x01
T_INTEREST_FRAGMENT = 0x02
T_CONTENT_OBJECT = 0x03
T_CONTENT_FRAGMENT = 0x04

# nested fields
T_NAME = 0x10
T_NAME_COMPONENT = 0x11
T_NAME_COUNT = 0x14
T_NONCE = 0x12
T_MU_MTU = 0x13
T_REASSEMBLY_ID = 0x20
T_SEQ = 0x21
T_COUNT = 0x22
T_FRAGMENT_DATA = 0x23
T_KEY_LOCATOR = 0x30
T_KEY = 0x31
T_KEY_NAME = 0x32
T_PAYLOAD = 0x33
T_SIGNATURE = 0x34
T_SCHEME_ID = 0x35
T_SIGNATURE_BITS = 0x36
T_OBJECT_SIZE = 0x40
T_INTERNAL_STATE = 0x41
T_PAYLOAD_OFFSET = 0x42
T_PAYLOAD_SIZE = 0x43
T_CONTENT_DIGEST = 0x44
T_FRAGMENT_PAYLOAD = 0x45
T_TRAILER = 0x46

FIELD_NAMES = {
    T_INTEREST: "Interest",
    T_INTEREST_FRAGMENT: "InterestFragment",
    T_CONTENT_OBJECT: "ContentObject",
    T_CONTENT_FRAGMENT: "ContentFragment",
    T_NAME: "Name",
    T_NAME_COMPONENT: "NameComponent",
    T_NAME_COUNT: "NameComponentCount",
    T_NONCE: "Nonce",
    T_MU_MTU: "MuMtu",
    T_REASSEMBLY_ID: "ReassemblyId",
    T_SEQ: "Seq",
    T_COUNT: "Count",
    T_FRAGMENT_DATA: "FragmentData",
    T_KEY_LOCATOR: "KeyLocator",
    T_KEY: "Key",
    T_KEY_NAME: "KeyName",
    T_PAYLOAD: "Payload",
    T_SIGNATURE: "Signature",
    T_SCHEME_ID: "SchemeId",
    T_SIGNATURE_BITS: "SignatureBits",
    T_OBJECT_SIZE: "ContentObjectSize",
    T_INTERNAL_STATE: "InternalState",
    T_PAYLOAD_OFFSET: "PayloadOffset",
    T_PAYLOAD_SIZE: "PayloadSize",
    T_CONTENT_DIGEST: "ContentDigest",
    T_FRAGMENT_PAYLOAD: "FragmentPayload",
    T_TRAILER: "Trailer",
}

# types whose value is itself a sequence of TLVs
CONTAINER_TYPES = frozenset(
    {T_INTEREST, T_INTEREST_FRAGMENT, T_CONTENT_OBJECT, T_CONTENT_FRAGMENT, T_NAME, T_KEY_LOCATOR, T_KEY_NAME,
     T_SIGNATURE, T_TRAILER}
)

TL_SIZE = 5
MAX_NAME_LENGTH = 8192
# no link may carry less than this; checked against interest MTU stamps and face configs
MIN_VIABLE_MTU = 256
NONCE_SIZE = 8
REASSEMBLY_ID_SIZE = 8


# ---------------------------------------------------------------------------
# packet types


@dataclass(frozen=True)
class Interest:
    name: Name
    nonce: bytes
    mu_mtu: int | None = None

    def __post_init__(self):
        if len(self.nonce) != NONCE_SIZE:
            raise InvariantViolation("Nonce", f"must be {NONCE_SIZE} bytes")
        if self.mu_mtu is not None and not MIN_VIABLE_MTU <= self.mu_mtu <= 0xFFFFFFFF:
            raise InvariantViolation("MuMtu", f"{self.mu_mtu} outside [{MIN_VIABLE_MTU}, 2^32)")


@dataclass(frozen=True)
class InterestFragment:
    reassembly_id: bytes
    seq: int
    count: int
    payload: bytes

    def __post_init__(self):
        if len(self.reassembly_id) != REASSEMBLY_ID_SIZE:
            raise InvariantViolation("ReassemblyId", f"must be {REASSEMBLY_ID_SIZE} bytes")
        if not 0 < self.count <= 0xFFFF:
            raise InvariantViolation("Count", f"{self.count} out of range")
        if not 0 <= self.seq < self.count:
            raise InvariantViolation("Seq", f"seq {self.seq} not below count {self.count}")
        if not self.payload:
            raise InvariantViolation("FragmentData", "empty")


@dataclass(frozen=True)
class ContentObject:
    name: Name
    key_locator: KeyLocator
    payload: bytes
    signature: Signature

    @cached_property
    def signable_region(self) -> bytes:
        return encode_signable(self.name, self.key_locator, self.payload)

    @cached_property
    def content_digest(self) -> bytes:
        region = self.signable_region
        return hashstate.finalize(hashstate.new_state(), region, len(region))


@dataclass(frozen=True)
class Trailer:
    """Key locator and signature, carried only by the fragment holding the final byte."""

    key_locator: KeyLocator
    signature: Signature


@dataclass(frozen=True)
class ContentFragment:
    name: Name
    content_object_size: int
    internal_state: HashState
    payload_offset: int
    content_digest: bytes
    payload: bytes
    trailer: Trailer | None = None

    def __post_init__(self):
        v, s, total = self.payload_offset, len(self.payload), self.content_object_size
        if total <= 0 or total > 0xFFFFFFFFFFFFFFFF:
            raise InvariantViolation("ContentObjectSize", f"{total} out of range")
        if v < 0 or v % BLOCK_SIZE:
            raise InvariantViolation("PayloadOffset", f"{v} is not a multiple of {BLOCK_SIZE}")
        if self.internal_state.bytes_processed != v:
            raise InvariantViolation(
                "InternalState", f"covers {self.internal_state.bytes_processed} bytes but PayloadOffset is {v}"
            )
        if s == 0 or s > 0xFFFFFFFF:
            raise InvariantViolation("PayloadSize", f"{s} out of range")
        if v + s > total:
            raise InvariantViolation("PayloadSize", f"range [{v}, {v + s}) runs past ContentObjectSize {total}")
        last = v + s == total
        if not last and s % BLOCK_SIZE:
            raise InvariantViolation("PayloadSize", f"non-final payload of {s} bytes is not block aligned")
        if last != (self.trailer is not None):
            raise InvariantViolation("Trailer", "present iff the fragment carries the final byte")
        if len(self.content_digest) != DIGEST_SIZE:
            raise InvariantViolation("ContentDigest", f"must be {DIGEST_SIZE} bytes")

    @property
    def payload_size(self) -> int:
        return len(self.payload)

    @property
    def end_offset(self) -> int:
        return self.payload_offset + len(self.payload)

    @property
    def is_last(self) -> bool:
        return self.trailer is not None

    @property
    def header_size(self) -> int:
        return header_size(self.name, self.trailer)


Packet = Union[Interest, InterestFragment, ContentObject, ContentFragment]


# ---------------------------------------------------------------------------
# encoding


def _tlv(t: int, value: bytes) -> bytes:
    return struct.pack(">BL", t, len(value)) + value


def encode_name(name: Name) -> bytes:
    # the explicit count makes a corrupted component length that swallows a neighbour detectable
    if len(name) > 0xFFFF:
        raise InvariantViolation("Name", f"{len(name)} components is too many")
    body = _tlv(T_NAME_COUNT, struct.pack(">H", len(name)))
    body += b"".join(_tlv(T_NAME_COMPONENT, c) for c in name.components)
    if len(body) + TL_SIZE > MAX_NAME_LENGTH:
        raise InvariantViolation("Name", f"encoded length {len(body) + TL_SIZE} exceeds {MAX_NAME_LENGTH}")
    return _tlv(T_NAME, body)


def encode_key_locator(kl: KeyLocator) -> bytes:
    if kl.key is not None:
        inner = _tlv(T_KEY, kl.key.to_bytes())
    else:
        inner = _tlv(T_KEY_NAME, encode_name(kl.key_name))
    return _tlv(T_KEY_LOCATOR, inner)


def encode_signature(sig: Signature) -> bytes:
    return _tlv(T_SIGNATURE, _tlv(T_SCHEME_ID, bytes([sig.scheme_id])) + _tlv(T_SIGNATURE_BITS, sig.sig_bytes))


def encode_signable(name: Name, key_locator: KeyLocator, payload: bytes) -> bytes:
    """The exact bytes a producer hashes and signs."""
    return encode_name(name) + encode_key_locator(key_locator) + _tlv(T_PAYLOAD, payload)


def encode_trailer(trailer: Trailer) -> bytes:
    return _tlv(T_TRAILER, encode_key_locator(trailer.key_locator) + encode_signature(trailer.signature))


def encode_interest(p: Interest) -> bytes:
    body = encode_name(p.name) + _tlv(T_NONCE, p.nonce)
    if p.mu_mtu is not None:
        body += _tlv(T_MU_MTU, struct.pack(">L", p.mu_mtu))
    return _tlv(T_INTEREST, body)


def encode_interest_fragment(p: InterestFragment) -> bytes:
    body = (
        _tlv(T_REASSEMBLY_ID, p.reassembly_id)
        + _tlv(T_SEQ, struct.pack(">H", p.seq))
        + _tlv(T_COUNT, struct.pack(">H", p.count))
        + _tlv(T_FRAGMENT_DATA, p.payload)
    )
    return _tlv(T_INTEREST_FRAGMENT, body)


def encode_content_object(p: ContentObject) -> bytes:
    return _tlv(T_CONTENT_OBJECT, p.signable_region + encode_signature(p.signature))


def _fragment_header_fields(cf: ContentFragment) -> bytes:
    return (
        encode_name(cf.name)
        + _tlv(T_OBJECT_SIZE, struct.pack(">Q", cf.content_object_size))
        + _tlv(T_INTERNAL_STATE, hashstate.serialize_state(cf.internal_state))
        + _tlv(T_PAYLOAD_OFFSET, struct.pack(">Q", cf.payload_offset))
        + _tlv(T_PAYLOAD_SIZE, struct.pack(">L", len(cf.payload)))
        + _tlv(T_CONTENT_DIGEST, cf.content_digest)
    )


def encode_content_fragment(p: ContentFragment) -> bytes:
    body = _fragment_header_fields(p) + _tlv(T_FRAGMENT_PAYLOAD, p.payload)
    if p.trailer is not None:
        body += encode_trailer(p.trailer)
    return _tlv(T_CONTENT_FRAGMENT, body)


# ContentObjectSize, InternalState, PayloadOffset, PayloadSize, ContentDigest, payload TL
_FIXED_FRAGMENT_HEADER = TL_SIZE + (TL_SIZE + 8) + (TL_SIZE + 40) + (TL_SIZE + 8) + (TL_SIZE + 4) + (TL_SIZE + 32) + TL_SIZE


def header_size(name: Name, trailer: Trailer | None = None) -> int:
    """Encoded size of a ContentFragment minus its payload bytes."""
    hs = _FIXED_FRAGMENT_HEADER + len(encode_name(name))
    if trailer is not None:
        hs += len(encode_trailer(trailer))
    return hs


def encoded_size(p: Packet) -> int:
    if isinstance(p, ContentFragment):
        return header_size(p.name, p.trailer) + len(p.payload)
    return len(encode(p))


_ENCODERS = {
    Interest: encode_interest,
    InterestFragment: encode_interest_fragment,
    ContentObject: encode_content_object,
    ContentFragment: encode_content_fragment,
}


def encode(p: Packet) -> bytes:
    try:
        return _ENCODERS[type(p)](p)
    except KeyError:
        raise TypeError(f"cannot encode {type(p).__name__}") from None


# ---------------------------------------------------------------------------
# decoding


class _Reader:
    __slots__ = ("buf", "pos", "end")

    def __init__(self, buf: memoryview, start: int = 0, end: int | None = None):
        self.buf = buf
        self.pos = start
        self.end = len(buf) if end is None else end

    def at_end(self) -> bool:
        return self.pos >= self.end

    def peek_type(self) -> int | None:
        return None if self.at_end() else self.buf[self.pos]

    def read(self, expected: int) -> memoryview:
        label = FIELD_NAMES.get(expected, hex(expected))
        if self.end - self.pos < TL_SIZE:
            raise Truncated(label, "missing type/length header")
        t = self.buf[self.pos]
        if t != expected:
            found = FIELD_NAMES.get(t, f"unknown type 0x{t:02x}")
            raise InvariantViolation(label, f"found {found} where {label} was expected")
        (length,) = struct.unpack_from(">L", self.buf, self.pos + 1)
        start = self.pos + TL_SIZE
        if length > self.end - start:
            raise Truncated(label, f"length {length} exceeds the {self.end - start} bytes available")
        self.pos = start + length
        return self.buf[start : start + length]

    def read_fixed(self, expected: int, size: int) -> bytes:
        value = self.read(expected)
        if len(value) != size:
            raise InvariantViolation(FIELD_NAMES[expected], f"must be {size} bytes, got {len(value)}")
        return bytes(value)

    def sub(self, expected: int) -> _Reader:
        value = self.read(expected)
        return _Reader(self.buf, self.pos - len(value), self.pos)

    def finish(self, label: str) -> None:
        if not self.at_end():
            raise InvariantViolation(label, f"{self.end - self.pos} unexpected trailing bytes")


def _decode_name(r: _Reader) -> Name:
    inner = r.sub(T_NAME)
    if inner.end - inner.pos + TL_SIZE > MAX_NAME_LENGTH:
        raise InvariantViolation("Name", f"longer than {MAX_NAME_LENGTH} bytes")
    (count,) = struct.unpack(">H", inner.read_fixed(T_NAME_COUNT, 2))
    comps = []
    while not inner.at_end():
        comps.append(bytes(inner.read(T_NAME_COMPONENT)))
    if len(comps) != count:
        raise InvariantViolation("Name", f"declares {count} components but holds {len(comps)}")
    if not comps or any(len(c) == 0 for c in comps):
        raise InvariantViolation("Name", "needs at least one non-empty component")
    return Name(tuple(comps))


def _decode_key_locator(r: _Reader) -> KeyLocator:
    inner = r.sub(T_KEY_LOCATOR)
    kind = inner.peek_type()
    if kind == T_KEY:
        raw = bytes(inner.read(T_KEY))
        try:
            kl = KeyLocator.embedded(PublicKey.from_bytes(raw))
        except (ValueError, UnsupportedScheme) as exc:
            raise InvariantViolation("Key", str(exc)) from None
    else:
        kn = inner.sub(T_KEY_NAME)
        kl = KeyLocator.named(_decode_name(kn))
        kn.finish("KeyName")
    inner.finish("KeyLocator")
    return kl


def _decode_signature(r: _Reader) -> Signature:
    inner = r.sub(T_SIGNATURE)
    scheme = inner.read_fixed(T_SCHEME_ID, 1)[0]
    bits = bytes(inner.read(T_SIGNATURE_BITS))
    inner.finish("Signature")
    try:
        return Signature(scheme, bits)
    except (ValueError, UnsupportedScheme) as exc:
        raise InvariantViolation("Signature", str(exc)) from None


def _decode_interest(r: _Reader) -> Interest:
    name = _decode_name(r)
    nonce = r.read_fixed(T_NONCE, NONCE_SIZE)
    mu = None
    if r.peek_type() == T_MU_MTU:
        (mu,) = struct.unpack(">L", r.read_fixed(T_MU_MTU, 4))
    r.finish("Interest")
    return Interest(name, nonce, mu)


def _decode_interest_fragment(r: _Reader) -> InterestFragment:
    rid = r.read_fixed(T_REASSEMBLY_ID, REASSEMBLY_ID_SIZE)
    (seq,) = struct.unpack(">H", r.read_fixed(T_SEQ, 2))
    (count,) = struct.unpack(">H", r.read_fixed(T_COUNT, 2))
    payload = bytes(r.read(T_FRAGMENT_DATA))
    r.finish("InterestFragment")
    return InterestFragment(rid, seq, count, payload)


def decode_signable(region: bytes) -> tuple[Name, KeyLocator, bytes]:
    """Split a signable region back into (name, key locator, payload)."""
    r = _Reader(memoryview(region))
    name = _decode_name(r)
    kl = _decode_key_locator(r)
    payload = bytes(r.read(T_PAYLOAD))
    r.finish("SignableRegion")
    return name, kl, payload


def _decode_content_object(r: _Reader) -> ContentObject:
    name = _decode_name(r)
    kl = _decode_key_locator(r)
    payload = bytes(r.read(T_PAYLOAD))
    sig = _decode_signature(r)
    r.finish("ContentObject")
    return ContentObject(name, kl, payload, sig)


def _decode_content_fragment(r: _Reader) -> ContentFragment:
    name = _decode_name(r)
    (total,) = struct.unpack(">Q", r.read_fixed(T_OBJECT_SIZE, 8))
    try:
        state = hashstate.deserialize_state(r.read_fixed(T_INTERNAL_STATE, hashstate.STATE_SIZE))
    except BadStateEncoding as exc:
        raise InvariantViolation("InternalState", str(exc)) from None
    (offset,) = struct.unpack(">Q", r.read_fixed(T_PAYLOAD_OFFSET, 8))
    (size,) = struct.unpack(">L", r.read_fixed(T_PAYLOAD_SIZE, 4))
    digest = r.read_fixed(T_CONTENT_DIGEST, DIGEST_SIZE)
    payload = bytes(r.read(T_FRAGMENT_PAYLOAD))
    if len(payload) != size:
        raise InvariantViolation("PayloadSize", f"declares {size} bytes but payload has {len(payload)}")
    trailer = None
    if r.peek_type() == T_TRAILER:
        tr = r.sub(T_TRAILER)
        trailer = Trailer(_decode_key_locator(tr), _decode_signature(tr))
        tr.finish("Trailer")
    r.finish("ContentFragment")
    return ContentFragment(name, total, state, offset, digest, payload, trailer)


_DECODERS = {
    T_INTEREST: _decode_interest,
    T_INTEREST_FRAGMENT: _decode_interest_fragment,
    T_CONTENT_OBJECT: _decode_content_object,
    T_CONTENT_FRAGMENT: _decode_content_fragment,
}


def decode(data: bytes) -> Packet:
    """Decode one complete packet; raises a :class:`~figoa.errors.WireError` subclass on bad input."""
    buf = memoryview(bytes(data))
    if len(buf) < TL_SIZE:
        raise Truncated("packet", "shorter than a type/length header")
    t = buf[0]
    decoder = _DECODERS.get(t)
    if decoder is None:
        raise UnknownType("packet", f"unknown top-level type 0x{t:02x}")
    outer = _Reader(buf)
    inner = outer.sub(t)
    outer.finish(FIELD_NAMES[t])
    try:
        return decoder(inner)
    except (ValueError, UnsupportedScheme) as exc:
        if isinstance(exc, (Truncated, UnknownType, InvariantViolation)):
            raise
        raise InvariantViolation(FIELD_NAMES[t], str(exc)) from None


def _decode_as(t: int, data: bytes):
    if not data or data[0] != t:
        raise UnknownType("packet", f"expected {FIELD_NAMES[t]}")
    return decode(data)


def decode_interest(data: bytes) -> Interest:
    return _decode_as(T_INTEREST, data)


def decode_interest_fragment(data: bytes) -> InterestFragment:
    return _decode_as(T_INTEREST_FRAGMENT, data)


def decode_content_object(data: bytes) -> ContentObject:
    return _decode_as(T_CONTENT_OBJECT, data)


def decode_content_fragment(data: bytes) -> ContentFragment:
    return _decode_as(T_CONTENT_FRAGMENT, data)
