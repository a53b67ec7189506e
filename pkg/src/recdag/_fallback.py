"""Pure numpy/Python kernels, mirroring `_core` bit for bit.

Same addressing, same float operations in the same order, so results are
byte-identical to the compiled lane — only slower.  Parent draws are
vectorized across nodes; the depth recurrences are inherently sequential
and run as a plain Python loop over precomputed parent blocks.
"""

import numpy as np

from ._philox import philox4_np, blocks_np, to_u53, U53

_BLOCK = 1 << 16


def raw_blocks(k0, k1, block_start, count):
    return blocks_np(k0, k1, block_start, count)


def _node_raws(seed, nodes, k):
    """First k stream words for each node key (seed, node): (len, k) uint64."""
    cols = []
    for b in range((k + 3) // 4):
        cols.extend(philox4_np(b, 0, 0, 0, seed, nodes.astype(np.uint64)))
    return np.stack(cols[:k], axis=1)


def parents_block(seed, lo, hi, k, mode, dtype=np.uint32):
    """Parent rows for nodes lo..hi-1, shape (hi-lo, k)."""
    nodes = np.arange(lo, hi, dtype=np.int64)
    u = to_u53(_node_raws(seed, nodes, k))
    if mode == 0:
        p = (u * nodes[:, None]).astype(np.int64)
        np.minimum(p, nodes[:, None] - 1, out=p)
        return p.astype(dtype)
    # without replacement: rank-map slot j over the nodes-j values not yet
    # chosen; nodes with fewer than k predecessors keep 0 in deficit slots
    out = np.zeros((len(nodes), k), dtype=np.int64)
    chosen = np.zeros((len(nodes), k), dtype=np.int64)  # sorted ascending per row
    for j in range(k):
        active = nodes > j
        r = nodes - j
        v = (u[:, j] * r).astype(np.int64)
        np.minimum(v, r - 1, out=v)
        for t in range(j):
            v += (v >= chosen[:, t]).astype(np.int64)
        out[active, j] = v[active]
        if j + 1 < k:
            merged = np.concatenate([chosen[:, :j], v[:, None]], axis=1)
            merged.sort(axis=1)
            chosen[active, : j + 1] = merged[active]
    return out.astype(dtype)


_WANT_BITS = (("S", 1), ("Rminus", 2), ("R", 4), ("Rplus", 8), ("L", 16))


def _profile_loop(n, k, want, parent_cols_iter):
    """Shared DP driver: parent_cols_iter yields (start, [col lists])."""
    if n + 1 > 1 << 32:
        raise ValueError("profile depths are stored 32-bit; n must be < 2**32")
    S = [0] * (n + 1) if want & 1 else None
    Rm = [0] * (n + 1) if want & 2 else None
    R = [0] * (n + 1) if want & 4 else None
    Rp = [0] * (n + 1) if want & 8 else None
    L = [0] * (n + 1) if want & 16 else None
    for start, cols in parent_cols_iter:
        for t in range(len(cols[0])):
            i = start + t
            row = [cols[j][t] for j in range(k)]
            if S is not None:
                S[i] = 1 + min(S[p] for p in row)
            if L is not None:
                L[i] = 1 + max(L[p] for p in row)
            if R is not None:
                R[i] = 1 + R[row[0]]
            if Rm is not None:
                Rm[i] = 1 + Rm[min(row)]
            if Rp is not None:
                Rp[i] = 1 + Rp[max(row)]
    out = {}
    for name, arr in (("S", S), ("Rminus", Rm), ("R", R), ("Rplus", Rp), ("L", L)):
        if arr is not None:
            out[name] = np.array(arr, dtype=np.uint32)
    return out


def stream_profiles(seed, n, k, mode, want):
    def gen():
        for lo in range(1, n + 1, _BLOCK):
            hi = min(lo + _BLOCK, n + 1)
            block = parents_block(seed, lo, hi, k, mode, dtype=np.int64)
            yield lo, [block[:, j].tolist() for j in range(k)]

    return _profile_loop(n, k, want, gen())


def table_profiles(parents, want):
    n, k = parents.shape

    def gen():
        for lo in range(0, n, _BLOCK):
            hi = min(lo + _BLOCK, n)
            block = parents[lo:hi].astype(np.int64, copy=False)
            yield lo + 1, [block[:, j].tolist() for j in range(k)]

    return _profile_loop(n, k, want, gen())


def chain_depths(seeds, node):
    """First-parent hop counts, vectorized across seeds."""
    seeds = np.asarray(seeds, dtype=np.uint64)
    pos = np.full(len(seeds), node, dtype=np.int64)
    depth = np.zeros(len(seeds), dtype=np.int64)
    active = pos > 0
    while active.any():
        idx = np.nonzero(active)[0]
        cur = pos[idx]
        w0 = philox4_np(0, 0, 0, 0, seeds[idx], cur.astype(np.uint64))[0]
        v = (to_u53(w0) * cur).astype(np.int64)
        np.minimum(v, cur - 1, out=v)
        pos[idx] = v
        depth[idx] += 1
        active[idx] = v > 0
    return depth


def brw_max_sum(k0, k1, ell, k):
    """Level-by-level maximum path sum; identical float order to the DFS."""
    from ._philox import words_np

    vals = np.zeros(1)
    start = 1  # heap id of first node at depth 1
    for depth in range(1, ell + 1):
        width = k ** depth
        ids_first = start
        raws = words_np(k0, k1, ids_first, width)
        edge = -np.log1p(-to_u53(raws))
        vals = np.repeat(vals, k) + edge
        start = start * k + 1
    return float(vals.max())
