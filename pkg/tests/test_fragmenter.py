import hashlib
import random

import pytest
from hypothesis import given, settings, strategies as st

from figoa import hashstate
from figoa.errors import MtuTooSmall
from figoa.fragmenter import FragmentPlan, fragment_content, plan_cuts, refragment
from figoa.hashstate import BLOCK_SIZE
from figoa.wire import encoded_size, header_size

from conftest import LONG_NAME, make_content, signable_oracle


def reassemble(frags):
    return b"".join(f.payload for f in sorted(frags, key=lambda f: f.payload_offset))


def check_chain(frags):
    frags = sorted(frags, key=lambda f: f.payload_offset)
    assert frags[0].internal_state == hashstate.new_state()
    for a, b in zip(frags, frags[1:]):
        assert a.end_offset == b.payload_offset
        assert hashstate.compress(a.internal_state, a.payload) == b.internal_state
    assert frags[-1].is_last and all(not f.is_last for f in frags[:-1])


def test_header_of_long_name_admits_1152_byte_payloads():
    assert 1500 - 1152 - BLOCK_SIZE < header_size(LONG_NAME) <= 1500 - 1152


def test_4kb_at_1500_gives_four_fragments_of_1152():
    co, _ = make_content(4096, LONG_NAME)
    frags = fragment_content(co, 1500)
    assert len(frags) == 4
    assert [len(f.payload) for f in frags[:-1]] == [1152] * 3
    check_chain(frags)


def test_refragment_at_1100_and_700():
    co, _ = make_content(4096, LONG_NAME)
    frags = fragment_content(co, 1500)
    for f in frags[:-1]:
        assert [len(p.payload) for p in refragment(f, 1100)] == [768, 384]
        assert len(refragment(f, 700)) == 3
    for mtu in (1100, 700):
        pieces = [p for f in frags for p in refragment(f, mtu)]
        assert all(encoded_size(p) <= mtu for p in pieces)
        check_chain(pieces)
        assert reassemble(pieces) == co.signable_region


def test_plan_8400_bytes_in_1152_pieces():
    plan = plan_cuts(8400, 0, 8400, 1152)
    assert plan.sizes == [1152] * 7 + [336]


def test_two_fragment_case():
    co, _ = make_content(1200)
    frags = fragment_content(co, 1200)
    assert len(frags) == 2
    assert frags[0].payload_offset == 0 and frags[0].internal_state == hashstate.new_state()
    s = len(frags[0].payload)
    assert frags[1].payload_offset == s


def test_small_content_is_one_fragment():
    co, _ = make_content(100)
    (f,) = fragment_content(co, 1500)
    assert f.is_last and f.payload == co.signable_region


def test_mtu_too_small():
    co, _ = make_content(100)
    with pytest.raises(MtuTooSmall):
        fragment_content(co, 80)
    with pytest.raises(MtuTooSmall):
        plan_cuts(1000, 0, 1000, 63)


def test_plan_validation():
    with pytest.raises(ValueError):
        FragmentPlan(((0, 100), (100, 64)))
    with pytest.raises(ValueError):
        FragmentPlan(((0, 64), (128, 64)))


def test_equal_size_split():
    # N a multiple of the budget, budget a multiple of the block: k = N / budget, v = i * s
    for k, s in [(3, 128), (5, 640), (7, 1152)]:
        plan = plan_cuts(k * s, 0, k * s, s)
        assert plan.cuts == tuple((i * s, s) for i in range(k))


@settings(max_examples=150)
@given(st.integers(1, 64 * 1024), st.integers(400, 9000), st.integers(0, 2**16))
def test_random_content_round_trip(size, mtu, seed):
    co, _ = make_content(size, seed=seed)
    frags = fragment_content(co, mtu)
    region, digest = signable_oracle(co)
    assert all(encoded_size(f) <= mtu for f in frags)
    assert reassemble(frags) == region
    check_chain(frags)
    last = frags[-1]
    tail = len(last.payload) - len(last.payload) % BLOCK_SIZE
    state = hashstate.advance(last.internal_state, last.payload)
    assert hashstate.finalize(state, last.payload[tail:], len(region)) == digest == last.content_digest


@settings(max_examples=200)
@given(st.integers(1, 20000), st.integers(0, 2**32), st.integers(1, 3))
def test_nested_refragment_identity(size, seed, depth):
    rng = random.Random(seed)
    co, _ = make_content(size, seed=seed % 251)
    frags = fragment_content(co, rng.randrange(600, 9000))
    for _ in range(depth):
        mtu = rng.randrange(400, 2000)
        frags = [p for f in frags for p in refragment(f, mtu)]
        assert all(encoded_size(p) <= mtu for p in frags)
    assert reassemble(frags) == co.signable_region
    check_chain(frags)
    assert hashlib.sha256(reassemble(frags)).digest() == co.content_digest


def test_refragment_that_fits_is_identity():
    co, _ = make_content(3000)
    frags = fragment_content(co, 1500)
    for f in frags:
        assert refragment(f, 1500) == [f]
