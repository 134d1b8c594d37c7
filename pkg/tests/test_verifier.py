import hashlib
import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from figoa import crypto
from figoa.errors import Incomplete
from figoa.fragmenter import fragment_content
from figoa.verifier import (
    AcceptComplete,
    BufferTable,
    DuplicateIgnored,
    Forward,
    HoldHostage,
    PendingContentBuffer,
    Reject,
    assemble,
    expire_buffers,
)

from conftest import make_content
from harness import MUTATIONS, deliver, mutate, shuffle_keeping_pairs, shuffled


def two_fragments():
    co, _ = make_content(1200)
    frags = fragment_content(co, 1200)
    assert len(frags) == 2
    return co, frags


def test_in_order_two_fragments():
    co, (a, b) = two_fragments()
    t = BufferTable()
    assert isinstance(t.on_fragment(a), Forward)
    d = t.on_fragment(b)
    assert isinstance(d, AcceptComplete)
    assert d.content == co and d.hostage == b
    assert len(t) == 0


def test_out_of_order_two_fragments():
    co, (a, b) = two_fragments()
    t = BufferTable()
    assert isinstance(t.on_fragment(b), HoldHostage)
    d = t.on_fragment(a)
    assert isinstance(d, AcceptComplete)
    assert d.release == (a, b)
    assert d.content == co


def test_known_states_track_origin():
    _, (a, b) = two_fragments()
    t = BufferTable()
    t.on_fragment(b)
    buf = next(iter(t.buffers.values()))
    assert buf.known_states[b.payload_offset][1] == "claimed"


def test_every_order_of_five_fragments():
    co, _ = make_content(5000)
    frags = fragment_content(co, 1300)
    assert len(frags) == 5
    for perm in itertools.permutations(frags):
        r = deliver(perm)
        assert r.accepted is not None and r.accepted.content == co
        assert not r.hostage_leaked


def test_duplicate_is_ignored():
    co, _ = make_content(3000)
    frags = fragment_content(co, 1000)
    t = BufferTable()
    t.on_fragment(frags[0])
    assert isinstance(t.on_fragment(frags[0]), DuplicateIgnored)


def test_overlap_rejects_and_tombstones():
    co, _ = make_content(3000)
    frags = fragment_content(co, 1000)
    small = fragment_content(co, 600)
    t = BufferTable()
    t.on_fragment(frags[0])
    overlapping = next(f for f in small if f.payload_offset > 0 and f.payload_offset < frags[0].end_offset)
    assert isinstance(t.on_fragment(overlapping), Reject)
    # later good fragments of the same content are refused too
    assert isinstance(t.on_fragment(frags[1]), Reject)


def test_mismatched_neighbour_state():
    co, _ = make_content(3000)
    frags = fragment_content(co, 1000)
    r = deliver([frags[0], mutate(frags[1:2], "state", random.Random(1))[0]])
    assert r.rejected and "differs" in r.reason


def test_wrong_signature_with_known_key():
    co, kp = make_content(2000)
    frags = mutate(fragment_content(co, 900), "signature", random.Random(3))
    assert deliver(frags).reason == "signature verification failed"


def test_named_key_resolution():
    co, kp = make_content(2000, named_key=True)
    frags = fragment_content(co, 900)
    key_name = co.key_locator.key_name
    assert deliver(frags, BufferTable(crypto.KeyRegistry({key_name: kp.public_key}))).accepted
    # router without the key falls back to the digest check
    assert deliver(frags, BufferTable()).accepted
    # an endpoint that insists on a signature rejects
    r = deliver(frags, BufferTable(require_signature=True))
    assert r.rejected and "no key" in r.reason
    other = crypto.generate_keypair(crypto.ED25519, b"other")
    r = deliver(frags, BufferTable(crypto.KeyRegistry({key_name: other.public_key})))
    assert r.reason == "signature verification failed"


def test_assemble_incomplete():
    co, _ = make_content(3000)
    frags = fragment_content(co, 1000)
    buf = PendingContentBuffer((co.name, co.content_digest), frags[0].content_object_size, 0.0)
    buf.insert(frags[0])
    with pytest.raises(Incomplete):
        assemble(buf)


def test_expiry_drops_hostage():
    co, _ = make_content(3000)
    frags = fragment_content(co, 1000)
    t = BufferTable()
    t.on_fragment(frags[-1], now=0.0)
    assert expire_buffers(t, 1.0, timeout=4.0) == []
    assert expire_buffers(t, 5.0, timeout=4.0) == [(co.name, co.content_digest)]
    assert len(t) == 0


@settings(max_examples=60)
@given(st.integers(1, 30000), st.integers(400, 4000), st.randoms(use_true_random=False))
def test_arrival_order_independence(size, mtu, rnd):
    co, _ = make_content(size, seed=size % 97)
    frags = fragment_content(co, mtu)
    order = shuffled(frags, rnd)
    r = deliver(order)
    assert r.accepted is not None
    assert r.accepted.content.signable_region == co.signable_region
    assert hashlib.sha256(r.accepted.content.signable_region).digest() == co.content_digest
    assert not r.hostage_leaked
    # the hostage is released only by the decision that completes the object
    assert r.decisions[-1] is r.accepted
    assert r.accepted.hostage == frags[-1]


@pytest.mark.parametrize("kind", MUTATIONS)
def test_mutations_are_rejected(kind):
    rng = random.Random(kind)
    for _ in range(40):
        co, _ = make_content(rng.randint(1, 12000), seed=rng.randrange(256))
        frags = fragment_content(co, rng.randint(400, 3000))
        items = shuffle_keeping_pairs(mutate(frags, kind, rng), kind, rng)
        r = deliver(items)
        assert r.rejected, (kind, r.reason)
        assert not r.hostage_leaked


def test_no_forward_after_reject():
    co, _ = make_content(6000)
    frags = fragment_content(co, 1000)
    bad = mutate(frags, "state", random.Random(2))
    t = BufferTable()
    decisions = [t.on_fragment(f) for f in bad]
    first = next(i for i, d in enumerate(decisions) if isinstance(d, Reject))
    assert all(isinstance(d, Reject) for d in decisions[first:])
