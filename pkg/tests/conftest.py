import random

import pytest
from hypothesis import settings

from figoa import crypto, sign_content
from figoa.name import Name

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

NEWS = Name.from_uri("/ndn/usa/cnn/frontpage/news")


def make_content(size, name=NEWS, seed=0, scheme=crypto.ED25519, named_key=False):
    rng = random.Random(seed)
    kp = crypto.generate_keypair(scheme, bytes([seed % 256]) * 32)
    locator = crypto.KeyLocator.named("/producer/KEY") if named_key else None
    return sign_content(name, rng.randbytes(size), kp, locator), kp


@pytest.fixture
def keypair():
    return crypto.generate_keypair(crypto.ED25519, b"\x01" * 32)


@pytest.fixture
def content():
    co, _ = make_content(4096)
    return co


# long enough that the fragment header (~300 bytes) matches a production NDN header
LONG_NAME = Name.from_uri(
    "/ndn/usa/cnn/frontpage/news/2026/10/19/europe/markets/"
    "energy-prices-climb-as-winter-approaches-analysts-warn-of-shortages"
)


def signable_oracle(co):
    """Independent rebuild of a content object's signed bytes and digest."""
    import hashlib

    from figoa.wire import encode_signable

    region = encode_signable(co.name, co.key_locator, co.payload)
    return region, hashlib.sha256(region).digest()
