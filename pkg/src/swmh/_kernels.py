"""Compiled hashing kernels.

All arithmetic is kept in uint64; numba promotes mixed int64/uint64 to
float64, so every constant is wrapped explicitly.
"""

import numpy as np
from numba import njit

U64_MAX = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_ELEM_SALT = np.uint64(0xD6E8FEB86659FD93)
_REP_SALT = np.uint64(0xA0761D6478BD642F)
_TABLE_SALT = np.uint64(0xE7037ED1A0B428DB)


@njit(inline="always")
def mix64(x):
    # splitmix64 finalizer: a bijection on 64-bit words
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


@njit(cache=True)
def function_keys(seed, start, count):
    s = mix64(np.uint64(seed) ^ _GOLDEN)
    keys = np.empty(count, dtype=np.uint64)
    for j in range(count):
        keys[j] = mix64(s + np.uint64(start + j + 1) * _GOLDEN)
    return keys


@njit(inline="always")
def element_hash(elem, rep):
    base = mix64(np.uint64(elem) + _ELEM_SALT)
    return mix64(base ^ (np.uint64(rep + 1) * _REP_SALT))


@njit(nogil=True, cache=True)
def signature_rows(indptr, elems, reps, keys, lo, hi, out):
    """Min-hash rows lo..hi-1 of a CSR multiset collection into out[lo:hi]."""
    nf = keys.shape[0]
    for s in range(lo, hi):
        row = out[s]
        for j in range(nf):
            row[j] = U64_MAX
        for k in range(indptr[s], indptr[s + 1]):
            e = elems[k]
            for rep in range(reps[k]):
                eh = element_hash(e, rep)
                for j in range(nf):
                    v = mix64(eh ^ keys[j])
                    if v < row[j]:
                        row[j] = v


@njit(nogil=True, cache=True)
def band_keys(sig, r, first_table, out):
    """out[i, b] = mixed key of tuple b (global index first_table + b) of row i."""
    n = sig.shape[0]
    nb = out.shape[1]
    for i in range(n):
        for b in range(nb):
            h = mix64(np.uint64(first_table + b) + _TABLE_SALT)
            for k in range(b * r, (b + 1) * r):
                h = mix64(h ^ sig[i, k]) + _GOLDEN
            out[i, b] = h


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def union_find_roots(n, left, right):
    """Root of every node after merging all (left[k], right[k]) edges.

    Union by size with path halving; the final partition does not depend on
    edge order, only the choice of root label does.
    """
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    for k in range(left.shape[0]):
        a = _find(parent, left[k])
        b = _find(parent, right[k])
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
    for x in range(n):
        parent[x] = _find(parent, x)
    return parent
