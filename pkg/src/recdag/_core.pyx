# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: parent generation, depth recurrences, chain hops,
and the branching-walk maximum.  Mirrors `_fallback` bit for bit; parity
is enforced by tests.  Keep the two in lockstep when touching either.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from *:
    """
    #include <stdint.h>
    typedef uint64_t u64;
    typedef unsigned __int128 rd_uint128;
    static const uint64_t RD_M0 = 0xD2E7470EE14C6C93ULL;
    static const uint64_t RD_M1 = 0xCA5A826395121157ULL;
    static const uint64_t RD_W0 = 0x9E3779B97F4A7C15ULL;
    static const uint64_t RD_W1 = 0xBB67AE8584CAA73BULL;
    /* Philox-4x64-10: block (c0..c3) under key (k0,k1) -> out[4]. */
    static inline void rd_philox4(uint64_t c0, uint64_t c1, uint64_t c2,
                                  uint64_t c3, uint64_t k0, uint64_t k1,
                                  uint64_t out[4]) {
        int r;
        for (r = 0; r < 10; r++) {
            rd_uint128 p0 = (rd_uint128)RD_M0 * c0;
            rd_uint128 p1 = (rd_uint128)RD_M1 * c2;
            c0 = (uint64_t)(p1 >> 64) ^ c1 ^ k0;
            c1 = (uint64_t)p1;
            c2 = (uint64_t)(p0 >> 64) ^ c3 ^ k1;
            c3 = (uint64_t)p0;
            k0 += RD_W0;
            k1 += RD_W1;
        }
        out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3;
    }
    """
    ctypedef unsigned long long u64
    void rd_philox4(u64 c0, u64 c1, u64 c2, u64 c3, u64 k0, u64 k1, u64 *out) nogil

from libc.math cimport log1p
from libc.stdlib cimport free, malloc

cdef double U53 = 1.0 / 9007199254740992.0

ctypedef fused parent_t:
    cnp.uint32_t
    cnp.uint64_t


cdef inline void _draw(u64 seed, long long node, int k, int mode,
                       long long *par, u64 *blk) nogil:
    """Parents of `node` into par[0..k-1]; blk is 4-word scratch."""
    cdef int j, t, nch
    cdef long long r, v
    cdef double u
    cdef long long ch[64]
    if mode == 0:  # with replacement
        for j in range(k):
            if (j & 3) == 0:
                rd_philox4(j >> 2, 0, 0, 0, seed, node, blk)
            u = <double>(blk[j & 3] >> 11) * U53
            v = <long long>(u * node)
            if v >= node:
                v = node - 1
            par[j] = v
    else:  # without replacement: rank-map each draw over remaining values
        nch = 0
        for j in range(k):
            r = node - j
            if r <= 0:
                par[j] = 0  # node has fewer than k predecessors
                continue
            if (j & 3) == 0:
                rd_philox4(j >> 2, 0, 0, 0, seed, node, blk)
            u = <double>(blk[j & 3] >> 11) * U53
            v = <long long>(u * r)
            if v >= r:
                v = r - 1
            t = 0
            while t < nch and v >= ch[t]:
                v += 1
                t += 1
            # keep ch sorted ascending
            nch += 1
            for r in range(nch - 1, t, -1):
                ch[r] = ch[r - 1]
            ch[t] = v
            par[j] = v


def raw_blocks(u64 k0, u64 k1, u64 block_start, Py_ssize_t count):
    """(count, 4) uint64 array of consecutive blocks of stream (k0, k1)."""
    out_arr = np.empty((count, 4), dtype=np.uint64)
    cdef u64[:, ::1] out = out_arr
    cdef Py_ssize_t b
    with nogil:
        for b in range(count):
            rd_philox4(block_start + <u64>b, 0, 0, 0, k0, k1, &out[b, 0])
    return out_arr


def parents_fill(u64 seed, long long lo, long long hi, int k, int mode,
                 parent_t[:, ::1] out):
    """Fill parent rows for nodes lo..hi-1 into out (row 0 = node lo)."""
    cdef long long i, j
    cdef long long par[64]
    cdef u64 blk[4]
    with nogil:
        for i in range(lo, hi):
            _draw(seed, i, k, mode, par, blk)
            for j in range(k):
                out[i - lo, j] = <parent_t>par[j]


def stream_profiles(u64 seed, long long n, int k, int mode, int want):
    """Generate the dag on the fly and run the depth recurrences.

    want is a bitmask: 1=S, 2=Rminus, 4=R, 8=Rplus, 16=L.  Returns a dict
    of uint32 arrays of length n+1 for the selected statistics only.
    """
    if n + 1 > <long long>1 << 32:
        raise ValueError("profile depths are stored 32-bit; n must be < 2**32")
    cdef cnp.ndarray[cnp.uint32_t, ndim=1] Sa, Ma, Ra, Pa, La
    cdef unsigned int *S = NULL
    cdef unsigned int *Rm = NULL
    cdef unsigned int *R = NULL
    cdef unsigned int *Rp = NULL
    cdef unsigned int *L = NULL
    out = {}
    if want & 1:
        Sa = np.zeros(n + 1, dtype=np.uint32); S = <unsigned int*>Sa.data; out["S"] = Sa
    if want & 2:
        Ma = np.zeros(n + 1, dtype=np.uint32); Rm = <unsigned int*>Ma.data; out["Rminus"] = Ma
    if want & 4:
        Ra = np.zeros(n + 1, dtype=np.uint32); R = <unsigned int*>Ra.data; out["R"] = Ra
    if want & 8:
        Pa = np.zeros(n + 1, dtype=np.uint32); Rp = <unsigned int*>Pa.data; out["Rplus"] = Pa
    if want & 16:
        La = np.zeros(n + 1, dtype=np.uint32); L = <unsigned int*>La.data; out["L"] = La

    cdef long long i, j, pmin, pmax, p
    cdef long long par[64]
    cdef u64 blk[4]
    cdef unsigned int smin, lmax
    with nogil:
        for i in range(1, n + 1):
            _draw(seed, i, k, mode, par, blk)
            pmin = par[0]; pmax = par[0]
            smin = 0xFFFFFFFF; lmax = 0
            for j in range(k):
                p = par[j]
                if p < pmin: pmin = p
                if p > pmax: pmax = p
                if S != NULL and S[p] < smin: smin = S[p]
                if L != NULL and L[p] > lmax: lmax = L[p]
            if S != NULL: S[i] = smin + 1
            if L != NULL: L[i] = lmax + 1
            if R != NULL: R[i] = R[par[0]] + 1
            if Rm != NULL: Rm[i] = Rm[pmin] + 1
            if Rp != NULL: Rp[i] = Rp[pmax] + 1
    return out


def table_profiles(const parent_t[:, ::1] parents, int want):
    """Same recurrences, parents taken from a materialized (n, k) table."""
    cdef long long n = parents.shape[0]
    cdef int k = <int>parents.shape[1]
    if n + 1 > <long long>1 << 32:
        raise ValueError("profile depths are stored 32-bit; n must be < 2**32")
    cdef cnp.ndarray[cnp.uint32_t, ndim=1] Sa, Ma, Ra, Pa, La
    cdef unsigned int *S = NULL
    cdef unsigned int *Rm = NULL
    cdef unsigned int *R = NULL
    cdef unsigned int *Rp = NULL
    cdef unsigned int *L = NULL
    out = {}
    if want & 1:
        Sa = np.zeros(n + 1, dtype=np.uint32); S = <unsigned int*>Sa.data; out["S"] = Sa
    if want & 2:
        Ma = np.zeros(n + 1, dtype=np.uint32); Rm = <unsigned int*>Ma.data; out["Rminus"] = Ma
    if want & 4:
        Ra = np.zeros(n + 1, dtype=np.uint32); R = <unsigned int*>Ra.data; out["R"] = Ra
    if want & 8:
        Pa = np.zeros(n + 1, dtype=np.uint32); Rp = <unsigned int*>Pa.data; out["Rplus"] = Pa
    if want & 16:
        La = np.zeros(n + 1, dtype=np.uint32); L = <unsigned int*>La.data; out["L"] = La

    cdef long long i, p, pmin, pmax, p0
    cdef int j
    cdef unsigned int smin, lmax
    with nogil:
        for i in range(1, n + 1):
            p0 = <long long>parents[i - 1, 0]
            pmin = p0; pmax = p0
            smin = 0xFFFFFFFF; lmax = 0
            for j in range(k):
                p = <long long>parents[i - 1, j]
                if p < pmin: pmin = p
                if p > pmax: pmax = p
                if S != NULL and S[p] < smin: smin = S[p]
                if L != NULL and L[p] > lmax: lmax = L[p]
            if S != NULL: S[i] = smin + 1
            if L != NULL: L[i] = lmax + 1
            if R != NULL: R[i] = R[p0] + 1
            if Rm != NULL: Rm[i] = Rm[pmin] + 1
            if Rp != NULL: Rp[i] = Rp[pmax] + 1
    return out


def chain_depths(const u64[::1] seeds, long long node):
    """First-parent hop count from `node` to 0, one entry per seed."""
    out_arr = np.empty(seeds.shape[0], dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t s
    cdef long long i, d, v
    cdef double u
    cdef u64 blk[4]
    with nogil:
        for s in range(seeds.shape[0]):
            i = node
            d = 0
            while i > 0:
                rd_philox4(0, 0, 0, 0, seeds[s], i, blk)
                u = <double>(blk[0] >> 11) * U53
                v = <long long>(u * i)
                if v >= i:
                    v = i - 1
                i = v
                d += 1
            out[s] = d
    return out_arr


def brw_max_sum(u64 k0, u64 k1, int ell, int k):
    """Max over all k**ell root-leaf paths of summed unit exponentials.

    Edge above heap node v (children of v are k*v+1+c) weighs
    -log1p(-u53(stream word v)); depth-first with O(ell) memory.
    """
    cdef double best = -1.0
    cdef int d = 0
    cdef u64 v
    cdef u64 blk[4]
    cdef double u
    cdef double *acc = <double*>malloc((ell + 1) * sizeof(double))
    cdef int *ci = <int*>malloc((ell + 1) * sizeof(int))
    cdef u64 *node = <u64*>malloc((ell + 1) * sizeof(u64))
    if acc == NULL or ci == NULL or node == NULL:
        free(acc); free(ci); free(node)
        raise MemoryError
    acc[0] = 0.0
    ci[0] = 0
    node[0] = 0
    with nogil:
        while d >= 0:
            if d == ell:
                if acc[d] > best:
                    best = acc[d]
                d -= 1
            elif ci[d] >= k:
                d -= 1
            else:
                v = node[d] * <u64>k + 1 + <u64>ci[d]
                ci[d] += 1
                rd_philox4(v >> 2, 0, 0, 0, k0, k1, blk)
                u = <double>(blk[v & 3] >> 11) * U53
                d += 1
                node[d] = v
                acc[d] = acc[d - 1] - log1p(-u)
                ci[d] = 0
    free(acc); free(ci); free(node)
    return best
