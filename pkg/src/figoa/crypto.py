"""Hash-and-sign signatures over content digests, plus a local key registry.

Two schemes ship:

* ``TEST_SCHEME`` (0): signature is SHA-256(secret || digest). The "public"
  key is the shared secret itself, so this is only useful for fast tests.
* ``ED25519`` (1): real asymmetric signatures via ``cryptography``.

Routers never fetch keys; a key-name locator either hits the local registry
or resolves to ``None``.
"""

from __future__ import annotations

import hashlib
import hmac
import os
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey
from cryptography.hazmat.primitives.serialization import Encoding, PrivateFormat, PublicFormat, NoEncryption

from .errors import UnsupportedScheme
from .name import Name

TEST_SCHEME = 0
ED25519 = 1

SIGNATURE_SIZE = {TEST_SCHEME: 32, ED25519: 64}
KEY_SIZE = {TEST_SCHEME: 32, ED25519: 32}


def _check_scheme(scheme_id: int) -> None:
    if scheme_id not in SIGNATURE_SIZE:
        raise UnsupportedScheme(f"unknown signature scheme {scheme_id}")


@dataclass(frozen=True)
class PublicKey:
    scheme_id: int
    key_bytes: bytes

    def __post_init__(self):
        _check_scheme(self.scheme_id)
        if len(self.key_bytes) != KEY_SIZE[self.scheme_id]:
            raise ValueError(f"scheme {self.scheme_id} keys are {KEY_SIZE[self.scheme_id]} bytes")

    def to_bytes(self) -> bytes:
        return bytes([self.scheme_id]) + self.key_bytes

    @classmethod
    def from_bytes(cls, data: bytes) -> PublicKey:
        if not data:
            raise ValueError("empty key encoding")
        return cls(data[0], bytes(data[1:]))


@dataclass(frozen=True)
class KeyPair:
    scheme_id: int
    public: bytes
    private: bytes = field(repr=False)

    @property
    def public_key(self) -> PublicKey:
        return PublicKey(self.scheme_id, self.public)


@dataclass(frozen=True)
class Signature:
    scheme_id: int
    sig_bytes: bytes

    def __post_init__(self):
        _check_scheme(self.scheme_id)
        if len(self.sig_bytes) != SIGNATURE_SIZE[self.scheme_id]:
            raise ValueError(
                f"scheme {self.scheme_id} signatures are {SIGNATURE_SIZE[self.scheme_id]} bytes, got {len(self.sig_bytes)}"
            )


@dataclass(frozen=True)
class KeyLocator:
    """Either an embedded public key or the name of one."""

    key: PublicKey | None = None
    key_name: Name | None = None

    def __post_init__(self):
        if (self.key is None) == (self.key_name is None):
            raise ValueError("KeyLocator takes exactly one of key or key_name")

    @property
    def mode(self) -> str:
        return "embedded-key" if self.key is not None else "key-name"

    @classmethod
    def embedded(cls, key: PublicKey) -> KeyLocator:
        return cls(key=key)

    @classmethod
    def named(cls, name: Name | str) -> KeyLocator:
        return cls(key_name=Name.from_uri(name) if isinstance(name, str) else name)


class KeyRegistry:
    """Read-only map from key name to public key."""

    def __init__(self, entries: Mapping[Name, PublicKey] | None = None):
        self._entries = MappingProxyType(dict(entries or {}))

    def get(self, key_name: Name) -> PublicKey | None:
        return self._entries.get(key_name)

    def __contains__(self, key_name):
        return key_name in self._entries

    def __len__(self):
        return len(self._entries)

    def with_key(self, key_name: Name, key: PublicKey) -> KeyRegistry:
        return KeyRegistry({**self._entries, key_name: key})


def generate_keypair(scheme_id: int = ED25519, seed: bytes | None = None) -> KeyPair:
    """New key pair; pass a 32-byte ``seed`` for a reproducible one."""
    _check_scheme(scheme_id)
    if seed is None:
        seed = os.urandom(32)
    seed = hashlib.sha256(seed).digest() if len(seed) != 32 else bytes(seed)
    if scheme_id == TEST_SCHEME:
        return KeyPair(TEST_SCHEME, seed, seed)
    sk = Ed25519PrivateKey.from_private_bytes(seed)
    pub = sk.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
    return KeyPair(ED25519, pub, sk.private_bytes(Encoding.Raw, PrivateFormat.Raw, NoEncryption()))


def keypair_from_private(scheme_id: int, private: bytes) -> KeyPair:
    _check_scheme(scheme_id)
    if len(private) != KEY_SIZE[scheme_id]:
        raise ValueError(f"scheme {scheme_id} private keys are {KEY_SIZE[scheme_id]} bytes")
    return generate_keypair(scheme_id, private)


def sign_digest(keypair: KeyPair, digest: bytes) -> Signature:
    _check_scheme(keypair.scheme_id)
    if len(digest) != 32:
        raise ValueError("digest must be 32 bytes")
    if keypair.scheme_id == TEST_SCHEME:
        return Signature(TEST_SCHEME, hashlib.sha256(keypair.private + digest).digest())
    sk = Ed25519PrivateKey.from_private_bytes(keypair.private)
    return Signature(ED25519, sk.sign(digest))


def verify_digest(public_key: PublicKey, digest: bytes, signature: Signature) -> bool:
    _check_scheme(public_key.scheme_id)
    _check_scheme(signature.scheme_id)
    if public_key.scheme_id != signature.scheme_id or len(digest) != 32:
        return False
    if signature.scheme_id == TEST_SCHEME:
        expected = hashlib.sha256(public_key.key_bytes + digest).digest()
        return hmac.compare_digest(expected, signature.sig_bytes)
    try:
        Ed25519PublicKey.from_public_bytes(public_key.key_bytes).verify(signature.sig_bytes, digest)
    except (InvalidSignature, ValueError):
        return False
    return True


def resolve_key(registry: KeyRegistry | None, locator: KeyLocator) -> PublicKey | None:
    if locator.key is not None:
        return locator.key
    if registry is None:
        return None
    return registry.get(locator.key_name)


# key files: one scheme byte followed by the raw key


def write_key_file(path, scheme_id: int, raw: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(bytes([scheme_id]) + raw)


def read_public_key(path) -> PublicKey:
    with open(path, "rb") as fh:
        return PublicKey.from_bytes(fh.read())


def read_keypair(path) -> KeyPair:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data:
        raise ValueError(f"{path}: empty key file")
    return keypair_from_private(data[0], data[1:])
