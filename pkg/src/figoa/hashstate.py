"""Resumable SHA-256.

A :class:`HashState` is the compression-function chaining value after some
whole number of 64-byte blocks have been absorbed, together with that byte
count. It can be shipped inside a fragment, resumed anywhere, and finished
once the total message length is known::

    >>> s = compress(new_state(), msg[:128])
    >>> finalize(s, msg[128:], len(msg)) == hashlib.sha256(msg).digest()
    True
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from . import _sha256
from .errors import BadStateEncoding, LengthMismatch, MisalignedInput

BLOCK_SIZE = _sha256.BLOCK_SIZE
DIGEST_SIZE = 32
STATE_SIZE = 40

_STATE_FMT = ">8LQ"


@dataclass(frozen=True)
class HashState:
    words: tuple[int, ...]
    bytes_processed: int = 0

    def __post_init__(self):
        if len(self.words) != 8 or any(not 0 <= w <= 0xFFFFFFFF for w in self.words):
            raise ValueError("HashState needs eight 32-bit words")
        if self.bytes_processed < 0 or self.bytes_processed % BLOCK_SIZE:
            raise MisalignedInput(f"bytes_processed={self.bytes_processed} is not a multiple of {BLOCK_SIZE}")

    def hex(self) -> str:
        return serialize_state(self).hex()


def new_state() -> HashState:
    """The SHA-256 initialization vector, nothing absorbed yet."""
    return HashState(_sha256.IV, 0)


def compress(state: HashState, data: bytes) -> HashState:
    """Absorb ``data`` (a positive multiple of 64 bytes) into ``state``."""
    n = len(data)
    if n == 0 or n % BLOCK_SIZE:
        raise MisalignedInput(f"cannot compress {n} bytes; need a positive multiple of {BLOCK_SIZE}")
    return HashState(_sha256.compress_blocks(state.words, bytes(data)), state.bytes_processed + n)


def advance(state: HashState, data: bytes) -> HashState:
    """Absorb the block-aligned prefix of ``data``; a no-op when it is shorter than a block."""
    aligned = len(data) - len(data) % BLOCK_SIZE
    if aligned == 0:
        return state
    return compress(state, data[:aligned])


def finalize(state: HashState, tail: bytes, total_len: int) -> bytes:
    """Finish the hash of a ``total_len``-byte message.

    ``tail`` is everything after ``state.bytes_processed``: any remaining
    whole blocks plus the final partial block. Standard length padding is
    applied, so the result is the ordinary SHA-256 digest of the message.
    """
    if state.bytes_processed + len(tail) != total_len:
        raise LengthMismatch(
            f"state covers {state.bytes_processed} bytes, tail {len(tail)}, but total_len is {total_len}"
        )
    padded = bytes(tail) + b"\x80"
    padded += b"\x00" * ((56 - len(padded)) % BLOCK_SIZE)
    padded += struct.pack(">Q", (total_len * 8) & 0xFFFFFFFFFFFFFFFF)
    words = _sha256.compress_blocks(state.words, padded)
    return struct.pack(">8L", *words)


def serialize_state(state: HashState) -> bytes:
    return struct.pack(_STATE_FMT, *state.words, state.bytes_processed)


def deserialize_state(data: bytes) -> HashState:
    if len(data) != STATE_SIZE:
        raise BadStateEncoding(f"internal state must be {STATE_SIZE} bytes, got {len(data)}")
    *words, count = struct.unpack(_STATE_FMT, data)
    if count % BLOCK_SIZE:
        raise BadStateEncoding(f"byte count {count} is not a multiple of {BLOCK_SIZE}")
    return HashState(tuple(words), count)
