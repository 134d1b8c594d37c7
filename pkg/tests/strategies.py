"""Hypothesis strategies for packets."""

from hypothesis import strategies as st

from figoa import crypto, hashstate
from figoa.hashstate import BLOCK_SIZE
from figoa.name import Name
from figoa.wire import ContentFragment, ContentObject, Interest, InterestFragment, Trailer

names = st.lists(st.binary(min_size=1, max_size=12), min_size=1, max_size=5).map(lambda c: Name(tuple(c)))
schemes = st.sampled_from([crypto.TEST_SCHEME, crypto.ED25519])


@st.composite
def public_keys(draw):
    scheme = draw(schemes)
    return crypto.PublicKey(scheme, draw(st.binary(min_size=crypto.KEY_SIZE[scheme], max_size=crypto.KEY_SIZE[scheme])))


@st.composite
def key_locators(draw):
    if draw(st.booleans()):
        return crypto.KeyLocator.embedded(draw(public_keys()))
    return crypto.KeyLocator.named(draw(names))


@st.composite
def signatures(draw):
    scheme = draw(schemes)
    size = crypto.SIGNATURE_SIZE[scheme]
    return crypto.Signature(scheme, draw(st.binary(min_size=size, max_size=size)))


interests = st.builds(
    Interest, names, st.binary(min_size=8, max_size=8), st.one_of(st.none(), st.integers(256, 0xFFFFFFFF))
)


@st.composite
def interest_fragments(draw):
    count = draw(st.integers(1, 0xFFFF))
    return InterestFragment(draw(st.binary(min_size=8, max_size=8)), draw(st.integers(0, count - 1)), count,
                            draw(st.binary(min_size=1, max_size=64)))


content_objects = st.builds(ContentObject, names, key_locators(), st.binary(max_size=300), signatures())


@st.composite
def content_fragments(draw):
    blocks_before = draw(st.integers(0, 40))
    v = blocks_before * BLOCK_SIZE
    last = draw(st.booleans())
    if last:
        s = draw(st.integers(1, 300))
        total = v + s
    else:
        s = draw(st.integers(1, 5)) * BLOCK_SIZE
        total = v + s + draw(st.integers(1, 500))
    state = hashstate.HashState(tuple(draw(st.lists(st.integers(0, 0xFFFFFFFF), min_size=8, max_size=8))), v)
    trailer = Trailer(draw(key_locators()), draw(signatures())) if last else None
    return ContentFragment(draw(names), total, state, v, draw(st.binary(min_size=32, max_size=32)),
                           draw(st.binary(min_size=s, max_size=s)), trailer)


packets = st.one_of(interests, interest_fragments(), content_objects, content_fragments())
