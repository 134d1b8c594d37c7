"""Fragmentation with in-network, out-of-order verification of signed NDN content."""

from . import crypto, hashstate, wire
from .crypto import ED25519, TEST_SCHEME, KeyLocator, KeyPair, KeyRegistry, PublicKey, Signature, generate_keypair
from .errors import (
    BadStateEncoding,
    FigoaError,
    Incomplete,
    InvalidTopology,
    LengthMismatch,
    MisalignedInput,
    MtuTooSmall,
    NoRoute,
    UnsupportedScheme,
    WireError,
)
from .forwarder import Consumer, Mode, Node, NodeConfig
from .fragmenter import fragment_content, plan_cuts, refragment
from .hashstate import HashState, advance, compress, finalize, new_state
from .name import Name
from .verifier import (
    AcceptComplete,
    BufferTable,
    DuplicateIgnored,
    Forward,
    HoldHostage,
    Reject,
    on_fragment,
)
from .wire import ContentFragment, ContentObject, Interest, InterestFragment, Trailer, decode, encode

__version__ = "0.1.0"


def sign_content(name: Name | str, payload: bytes, keypair: KeyPair, key_locator: KeyLocator | None = None) -> ContentObject:
    """Build a signed :class:`ContentObject`; the key is embedded unless a locator is given."""
    name = Name.from_uri(name) if isinstance(name, str) else name
    if key_locator is None:
        key_locator = KeyLocator.embedded(keypair.public_key)
    region = wire.encode_signable(name, key_locator, payload)
    digest = hashstate.finalize(hashstate.new_state(), region, len(region))
    return ContentObject(name, key_locator, payload, crypto.sign_digest(keypair, digest))


__all__ = [
    "AcceptComplete",
    "BadStateEncoding",
    "BufferTable",
    "Consumer",
    "ContentFragment",
    "ContentObject",
    "DuplicateIgnored",
    "ED25519",
    "FigoaError",
    "Forward",
    "HashState",
    "HoldHostage",
    "Incomplete",
    "Interest",
    "InterestFragment",
    "InvalidTopology",
    "KeyLocator",
    "KeyPair",
    "KeyRegistry",
    "LengthMismatch",
    "MisalignedInput",
    "Mode",
    "MtuTooSmall",
    "Name",
    "Node",
    "NodeConfig",
    "NoRoute",
    "PublicKey",
    "Reject",
    "Signature",
    "TEST_SCHEME",
    "Trailer",
    "UnsupportedScheme",
    "WireError",
    "advance",
    "compress",
    "decode",
    "encode",
    "finalize",
    "fragment_content",
    "generate_keypair",
    "new_state",
    "on_fragment",
    "plan_cuts",
    "refragment",
    "sign_content",
]
