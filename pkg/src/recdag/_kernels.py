"""Kernel lane selection: compiled extension when available, numpy fallback
otherwise.  ``RECDAG_PURE_PYTHON=1`` forces the fallback.  Both lanes are
bit-identical (enforced by the parity tests); the choice only affects speed.
"""

import os

import numpy as np

from . import _fallback

WANT_BITS = {"S": 1, "Rminus": 2, "R": 4, "Rplus": 8, "L": 16}

_core = None
if os.environ.get("RECDAG_PURE_PYTHON", "") != "1":
    try:
        from . import _core  # type: ignore[no-redef]
    except ImportError:
        _core = None

LANE = "compiled" if _core is not None else "python"


def want_mask(stats):
    mask = 0
    for s in stats:
        mask |= WANT_BITS[s]
    return mask


def raw_blocks(k0, k1, block_start, count):
    if _core is not None:
        return _core.raw_blocks(k0, k1, block_start, count)
    return _fallback.raw_blocks(k0, k1, block_start, count)


def words(k0, k1, word_start, count):
    """``count`` consecutive stream words (uint64) starting at ``word_start``."""
    first = word_start >> 2
    last = (word_start + count - 1) >> 2
    flat = raw_blocks(k0, k1, first, last - first + 1).ravel()
    off = word_start - 4 * first
    return flat[off:off + count]


def parents_block(seed, lo, hi, k, mode, dtype=np.uint32):
    if _core is not None:
        out = np.empty((hi - lo, k), dtype=dtype)
        _core.parents_fill(seed, lo, hi, k, mode, out)
        return out
    return _fallback.parents_block(seed, lo, hi, k, mode, dtype=dtype)


def parents_fill_into(seed, lo, hi, k, mode, out):
    """Fill rows of a preallocated table slice (used for threaded builds)."""
    if _core is not None:
        _core.parents_fill(seed, lo, hi, k, mode, out)
    else:
        out[:] = _fallback.parents_block(seed, lo, hi, k, mode, dtype=out.dtype)


def stream_profiles(seed, n, k, mode, want):
    if _core is not None:
        return _core.stream_profiles(seed, n, k, mode, want)
    return _fallback.stream_profiles(seed, n, k, mode, want)


def table_profiles(parents, want):
    if _core is not None:
        return _core.table_profiles(parents, want)
    return _fallback.table_profiles(parents, want)


def chain_depths(seeds, node):
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
    if _core is not None:
        return _core.chain_depths(seeds, node)
    return _fallback.chain_depths(seeds, node)


def brw_max_sum(k0, k1, ell, k):
    if _core is not None:
        return _core.brw_max_sum(k0, k1, ell, k)
    return _fallback.brw_max_sum(k0, k1, ell, k)
