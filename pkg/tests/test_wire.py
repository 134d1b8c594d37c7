import random
import struct

import pytest
from hypothesis import given, settings, strategies as st

from figoa import hashstate, wire
from figoa.errors import InvariantViolation, Truncated, UnknownType, WireError
from figoa.fragmenter import fragment_content
from figoa.name import Name
from figoa.wire import ContentFragment, Interest, Trailer, decode, encode

from conftest import NEWS, make_content
from strategies import content_fragments, packets


@settings(max_examples=1000)
@given(packets)
def test_round_trip(p):
    data = encode(p)
    assert decode(data) == p
    assert encode(decode(data)) == data


@given(content_fragments())
def test_encoded_size_and_header_size(cf):
    data = encode(cf)
    assert wire.encoded_size(cf) == len(data)
    assert cf.header_size == len(data) - len(cf.payload)


def test_header_size_short_name():
    name = Name.from_uri("/a")
    cf = ContentFragment(name, 1000, hashstate.new_state(), 0, bytes(32), bytes(128))
    assert wire.header_size(name) == len(encode(cf)) - 128


def test_trailer_adds_its_own_size(content):
    trailer = Trailer(content.key_locator, content.signature)
    assert wire.header_size(NEWS, trailer) - wire.header_size(NEWS) == len(wire.encode_trailer(trailer))


def test_header_admits_1152_byte_payloads_at_1500():
    assert wire.header_size(NEWS) <= 1500 - 1152


def test_misaligned_state_offset_pair():
    with pytest.raises(InvariantViolation):
        ContentFragment(NEWS, 1000, hashstate.new_state(), 64, bytes(32), bytes(64))


@pytest.mark.parametrize(
    "kwargs, field",
    [
        (dict(payload_offset=10), "PayloadOffset"),
        (dict(payload=bytes(100)), "PayloadSize"),
        (dict(payload=b""), "PayloadSize"),
        (dict(content_object_size=100), "PayloadSize"),
        (dict(content_digest=bytes(31)), "ContentDigest"),
    ],
)
def test_fragment_invariants(kwargs, field):
    base = dict(name=NEWS, content_object_size=1000, internal_state=hashstate.new_state(), payload_offset=0,
                content_digest=bytes(32), payload=bytes(128), trailer=None)
    base.update(kwargs)
    if "payload_offset" in kwargs:
        base["internal_state"] = hashstate.new_state()
    with pytest.raises(InvariantViolation) as exc:
        ContentFragment(**base)
    assert exc.value.field == field


def test_trailer_only_on_last(content):
    frags = fragment_content(content, 1500)
    last = frags[-1]
    with pytest.raises(InvariantViolation):
        ContentFragment(last.name, last.content_object_size, last.internal_state, last.payload_offset,
                        last.content_digest, last.payload, None)


def test_decode_rejects_trailing_garbage():
    data = encode(Interest(NEWS, bytes(8)))
    with pytest.raises(InvariantViolation):
        decode(data + b"\x00")


def test_decode_rejects_unknown_type():
    data = bytearray(encode(Interest(NEWS, bytes(8))))
    data[0] = 0x7F
    with pytest.raises(UnknownType):
        decode(bytes(data))


@pytest.mark.parametrize("cut", [0, 3, 10, 40])
def test_truncated(cut):
    data = encode(Interest(NEWS, bytes(8)))
    with pytest.raises(Truncated):
        decode(data[: len(data) - cut - 1] if cut else data[:4])


def _length_positions(data):
    """Offsets of every length field in a TLV tree (nested types included)."""
    out = []

    def walk(start, end, depth):
        pos = start
        while pos + 5 <= end:
            t = data[pos]
            (length,) = struct.unpack_from(">L", data, pos + 1)
            out.extend(range(pos + 1, pos + 5))
            if t in wire.CONTAINER_TYPES:
                walk(pos + 5, pos + 5 + length, depth + 1)
            pos += 5 + length

    walk(0, len(data), 0)
    return out


def test_length_byte_mutations_never_decode_silently():
    rng = random.Random(7)
    co, _ = make_content(700)
    frags = fragment_content(co, 400)
    outcomes = set()
    for _ in range(1000):
        cf = rng.choice(frags)
        data = bytearray(encode(cf))
        pos = rng.choice(_length_positions(data))
        data[pos] ^= 1 << rng.randrange(8)
        with pytest.raises(WireError) as exc:
            decode(bytes(data))
        outcomes.add(type(exc.value))
    assert outcomes <= {Truncated, InvariantViolation}


@given(st.binary(max_size=200))
def test_garbage_only_raises_wire_errors(data):
    try:
        decode(data)
    except WireError:
        pass
