"""Deterministic stream abstraction over the addressed generator.

A stream is identified by (master seed, stream index) — the generator
key — and yields 64-bit words, uniforms in [0, 1), or unit exponentials.
Streams with distinct indices under one master are independent.  Word
``j`` of a stream is a pure function of (key, j), so sequential draws and
random access (`u53_at`) see the same sequence; tree-structured samplers
exploit that to index a fresh stream by position instead of consuming it.
"""

import math

import numpy as np

from . import _kernels, _philox
from ._philox import GENERATOR_ID  # noqa: F401  (re-exported; part of the API)
from .errors import DomainError

_U64_MAX = (1 << 64) - 1


def _check_u64(value, name):
    if not isinstance(value, (int, np.integer)) or not 0 <= int(value) <= _U64_MAX:
        raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value!r}")
    return int(value)


class RngStream:
    """Sequential view of the stream keyed (master_seed, stream_index)."""

    def __init__(self, master_seed, stream_index=0):
        self._k0 = _check_u64(master_seed, "master_seed")
        self._k1 = _check_u64(stream_index, "stream_index")
        self._pos = 0

    @property
    def origin(self):
        return (self._k0, self._k1)

    @property
    def position(self):
        """Number of 64-bit words consumed so far."""
        return self._pos

    def raw64(self, count=None):
        """Next raw word (scalar) or `count` words (uint64 array)."""
        if count is None:
            w = _philox.raw_at(self._k0, self._k1, self._pos)
            self._pos += 1
            return w
        out = _kernels.words(self._k0, self._k1, self._pos, count)
        self._pos += count
        return out

    def uniforms(self, count=None):
        """Uniform floats in [0, 1) with 53 random bits."""
        if count is None:
            return (self.raw64() >> 11) * _philox.U53
        return _philox.to_u53(self.raw64(count))

    def exponentials(self, count=None):
        """Unit exponentials via inverse CDF (reproducible across platforms)."""
        if count is None:
            return -math.log1p(-self.uniforms())
        return -np.log1p(-self.uniforms(count))

    def u53_at(self, index):
        """Random access: uniform number `index` of this stream's sequence.

        Does not move the cursor; position `index` coincides with what the
        `index`-th sequential `uniforms()` call would return.
        """
        return _philox.u53_at(self._k0, self._k1, index)

    def __repr__(self):
        return f"RngStream(master_seed={self._k0}, stream_index={self._k1}, position={self._pos})"
