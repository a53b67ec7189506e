"""Counter-based pseudo-random core: Philox-4x64 with 10 rounds.

All randomness in this package is addressed, never consumed from hidden
state: a 128-bit key (two 64-bit words) plus a 64-bit block counter maps
to four 64-bit output words.  Word ``j`` of a logical stream lives at
block ``j >> 2``, lane ``j & 3``, so any draw can be recomputed in O(1)
without replaying anything that came before it.  That property is load
bearing: node parents, replication seeds, chain hops and tree-edge
weights all index into key/counter space directly.

The constants and round function are the standard Philox-4x64 ones, so
output can be cross-checked against independent implementations (note
for comparisons: numpy's ``Philox`` bit generator increments the counter
*before* producing a block, i.e. our block ``c`` equals numpy's first
block when numpy is seeded with counter ``c - 1``).

The generator family is frozen; golden vectors in the test suite gate
any change.
"""

import numpy as np

GENERATOR_ID = "philox4x64-10/addressed/v1"

_MASK = (1 << 64) - 1
_M0 = 0xD2E7470EE14C6C93
_M1 = 0xCA5A826395121157
_W0 = 0x9E3779B97F4A7C15
_W1 = 0xBB67AE8584CAA73B

# float in [0, 1) with 53 random bits: (word >> 11) * 2**-53
U53 = 1.0 / 9007199254740992.0


def philox4(c0, c1, c2, c3, k0, k1):
    """One 256-bit block from counter (c0..c3) and key (k0, k1). Pure Python."""
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = (
            ((p1 >> 64) ^ c1 ^ k0),
            p1 & _MASK,
            ((p0 >> 64) ^ c3 ^ k1),
            p0 & _MASK,
        )
        k0 = (k0 + _W0) & _MASK
        k1 = (k1 + _W1) & _MASK
    return c0, c1, c2, c3


def raw_at(k0, k1, index):
    """Word ``index`` of the stream keyed (k0, k1): scalar spot access."""
    return philox4(index >> 2, 0, 0, 0, k0, k1)[index & 3]


def u53_at(k0, k1, index):
    return (raw_at(k0, k1, index) >> 11) * U53


# ---------------------------------------------------------------------------
# Vectorized evaluation.  numpy has no 128-bit integers, so the two
# 64x64->128 multiplies per round are done in 32-bit halves.  uint64
# arithmetic wraps, which is exactly what the low halves need.

_U64 = np.uint64


def _mulhilo(a, b):
    """(high, low) words of a * b for uint64 arrays/scalars a, b."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    lo32 = _U64(0xFFFFFFFF)
    s32 = _U64(32)
    al = a & lo32
    ah = a >> s32
    bl = b & lo32
    bh = b >> s32
    t1 = ah * bl + ((al * bl) >> s32)
    t2 = al * bh + (t1 & lo32)
    hi = ah * bh + (t1 >> s32) + (t2 >> s32)
    return hi, a * b


def philox4_np(c0, c1, c2, c3, k0, k1):
    """Vectorized block: all six inputs broadcast together as uint64 arrays."""
    c0, c1, c2, c3, k0, k1 = (
        np.array(x, dtype=np.uint64, copy=True)
        for x in np.broadcast_arrays(
            np.asarray(c0, np.uint64), np.asarray(c1, np.uint64),
            np.asarray(c2, np.uint64), np.asarray(c3, np.uint64),
            np.asarray(k0, np.uint64), np.asarray(k1, np.uint64),
        )
    )
    m0 = _U64(_M0)
    m1 = _U64(_M1)
    w0 = _U64(_W0)
    w1 = _U64(_W1)
    for _ in range(10):
        hi0, lo0 = _mulhilo(c0, m0)
        hi1, lo1 = _mulhilo(c2, m1)
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
        k0 = k0 + w0
        k1 = k1 + w1
    return c0, c1, c2, c3


def blocks_np(k0, k1, block_start, count):
    """``count`` consecutive blocks of the (k0, k1) stream as a (count, 4) array."""
    counters = np.arange(block_start, block_start + count, dtype=np.uint64)
    w0, w1, w2, w3 = philox4_np(counters, 0, 0, 0, k0, k1)
    return np.stack([w0, w1, w2, w3], axis=1)


def words_np(k0, k1, word_start, count):
    """``count`` consecutive stream words starting at ``word_start``."""
    first_block = word_start >> 2
    last_block = (word_start + count - 1) >> 2
    flat = blocks_np(k0, k1, first_block, last_block - first_block + 1).ravel()
    off = word_start - 4 * first_block
    return flat[off:off + count]


def to_u53(words):
    """Map raw 64-bit words to floats in [0, 1)."""
    return (words >> _U64(11)).astype(np.float64) * U53
