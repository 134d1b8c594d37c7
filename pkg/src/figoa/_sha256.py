"""SHA-256 compression function (FIPS 180-4), block-at-a-time.

``compress_blocks(words, data)`` runs the compression function over every
64-byte block of ``data`` starting from the eight chaining words ``words``
and returns the new chaining words. No padding, no length tracking: that is
the caller's job.

A numba-compiled kernel is used when numba is importable; otherwise the pure
Python loop below does the same work (about 100x slower).
"""

import os
import struct

import numpy as np

K = (
    0x428A2F98, 0x71374491, 0xB5C0FBCF, 0xE9B5DBA5, 0x3956C25B, 0x59F111F1, 0x923F82A4, 0xAB1C5ED5,
    0xD807AA98, 0x12835B01, 0x243185BE, 0x550C7DC3, 0x72BE5D74, 0x80DEB1FE, 0x9BDC06A7, 0xC19BF174,
    0xE49B69C1, 0xEFBE4786, 0x0FC19DC6, 0x240CA1CC, 0x2DE92C6F, 0x4A7484AA, 0x5CB0A9DC, 0x76F988DA,
    0x983E5152, 0xA831C66D, 0xB00327C8, 0xBF597FC7, 0xC6E00BF3, 0xD5A79147, 0x06CA6351, 0x14292967,
    0x27B70A85, 0x2E1B2138, 0x4D2C6DFC, 0x53380D13, 0x650A7354, 0x766A0ABB, 0x81C2C92E, 0x92722C85,
    0xA2BFE8A1, 0xA81A664B, 0xC24B8B70, 0xC76C51A3, 0xD192E819, 0xD6990624, 0xF40E3585, 0x106AA070,
    0x19A4C116, 0x1E376C08, 0x2748774C, 0x34B0BCB5, 0x391C0CB3, 0x4ED8AA4A, 0x5B9CCA4F, 0x682E6FF3,
    0x748F82EE, 0x78A5636F, 0x84C87814, 0x8CC70208, 0x90BEFFFA, 0xA4506CEB, 0xBEF9A3F7, 0xC67178F2,
)

IV = (0x6A09E667, 0xBB67AE85, 0x3C6EF372, 0xA54FF53A, 0x510E527F, 0x9B05688C, 0x1F83D9AB, 0x5BE0CD19)

BLOCK_SIZE = 64
_M = 0xFFFFFFFF


def _rotr(x, n):
    return ((x >> n) | (x << (32 - n))) & _M


def compress_blocks_py(words, data):
    h0, h1, h2, h3, h4, h5, h6, h7 = words
    w = [0] * 64
    for off in range(0, len(data), BLOCK_SIZE):
        w[0:16] = struct.unpack_from(">16L", data, off)
        for i in range(16, 64):
            x = w[i - 15]
            y = w[i - 2]
            s0 = _rotr(x, 7) ^ _rotr(x, 18) ^ (x >> 3)
            s1 = _rotr(y, 17) ^ _rotr(y, 19) ^ (y >> 10)
            w[i] = (w[i - 16] + s0 + w[i - 7] + s1) & _M
        a, b, c, d, e, f, g, h = h0, h1, h2, h3, h4, h5, h6, h7
        for i in range(64):
            t1 = (h + (_rotr(e, 6) ^ _rotr(e, 11) ^ _rotr(e, 25)) + ((e & f) ^ (~e & g)) + K[i] + w[i]) & _M
            t2 = ((_rotr(a, 2) ^ _rotr(a, 13) ^ _rotr(a, 22)) + ((a & b) ^ (a & c) ^ (b & c))) & _M
            h, g, f, e, d, c, b, a = g, f, e, (d + t1) & _M, c, b, a, (t1 + t2) & _M
        h0 = (h0 + a) & _M
        h1 = (h1 + b) & _M
        h2 = (h2 + c) & _M
        h3 = (h3 + d) & _M
        h4 = (h4 + e) & _M
        h5 = (h5 + f) & _M
        h6 = (h6 + g) & _M
        h7 = (h7 + h) & _M
    return (h0, h1, h2, h3, h4, h5, h6, h7)


def _build_numba_kernel():
    from numba import njit

    k_arr = np.array(K, dtype=np.uint64)

    @njit(cache=True, nogil=True)
    def kernel(h_in, data):
        m = np.uint64(0xFFFFFFFF)
        h = h_in.copy()
        w = np.empty(64, np.uint64)
        for off in range(0, data.shape[0], 64):
            for i in range(16):
                j = off + 4 * i
                w[i] = (
                    (np.uint64(data[j]) << np.uint64(24))
                    | (np.uint64(data[j + 1]) << np.uint64(16))
                    | (np.uint64(data[j + 2]) << np.uint64(8))
                    | np.uint64(data[j + 3])
                )
            for i in range(16, 64):
                x = w[i - 15]
                y = w[i - 2]
                s0 = (((x >> np.uint64(7)) | (x << np.uint64(25))) ^ ((x >> np.uint64(18)) | (x << np.uint64(14))) ^ (x >> np.uint64(3))) & m
                s1 = (((y >> np.uint64(17)) | (y << np.uint64(15))) ^ ((y >> np.uint64(19)) | (y << np.uint64(13))) ^ (y >> np.uint64(10))) & m
                w[i] = (w[i - 16] + s0 + w[i - 7] + s1) & m
            a = h[0]
            b = h[1]
            c = h[2]
            d = h[3]
            e = h[4]
            f = h[5]
            g = h[6]
            hh = h[7]
            for i in range(64):
                s1 = (((e >> np.uint64(6)) | (e << np.uint64(26))) ^ ((e >> np.uint64(11)) | (e << np.uint64(21))) ^ ((e >> np.uint64(25)) | (e << np.uint64(7)))) & m
                ch = (e & f) ^ ((~e & m) & g)
                t1 = (hh + s1 + ch + k_arr[i] + w[i]) & m
                s0 = (((a >> np.uint64(2)) | (a << np.uint64(30))) ^ ((a >> np.uint64(13)) | (a << np.uint64(19))) ^ ((a >> np.uint64(22)) | (a << np.uint64(10)))) & m
                maj = (a & b) ^ (a & c) ^ (b & c)
                t2 = (s0 + maj) & m
                hh = g
                g = f
                f = e
                e = (d + t1) & m
                d = c
                c = b
                b = a
                a = (t1 + t2) & m
            h[0] = (h[0] + a) & m
            h[1] = (h[1] + b) & m
            h[2] = (h[2] + c) & m
            h[3] = (h[3] + d) & m
            h[4] = (h[4] + e) & m
            h[5] = (h[5] + f) & m
            h[6] = (h[6] + g) & m
            h[7] = (h[7] + hh) & m
        return h

    def compress_blocks_jit(words, data):
        out = kernel(np.array(words, dtype=np.uint64), np.frombuffer(data, dtype=np.uint8))
        return tuple(int(x) for x in out)

    # compile now so the first real call does not pay for it
    compress_blocks_jit(IV, bytes(BLOCK_SIZE))
    return compress_blocks_jit


compress_blocks = compress_blocks_py
ACCELERATED = False

if os.environ.get("FIGOA_PURE_PYTHON", "") in ("", "0"):
    try:
        compress_blocks = _build_numba_kernel()
        ACCELERATED = True
    except ImportError:
        pass
