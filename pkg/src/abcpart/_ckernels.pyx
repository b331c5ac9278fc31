# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for subset scoring and independent-set search.

Callers guarantee that every intermediate score fits into a signed 64-bit
integer and that m, n <= 63.
"""

from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport malloc, free


cdef inline int _popcount(uint64_t x) nogil:
    return __builtin_popcountll(x)


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


def best_subsets(int m, int k, ballot_masks, sizes, weights, table):
    cdef Py_ssize_t ng = len(ballot_masks)
    cdef int ymax = len(table) - 1
    cdef uint64_t* bm = <uint64_t*> malloc(ng * sizeof(uint64_t))
    cdef int64_t* w = <int64_t*> malloc(ng * sizeof(int64_t))
    cdef int* sz = <int*> malloc(ng * sizeof(int))
    cdef int64_t* tab = <int64_t*> malloc((ymax + 1) * (ymax + 1) * sizeof(int64_t))
    cdef Py_ssize_t i, x, y
    cdef uint64_t mask, low, ripple, limit
    cdef int64_t score, best = 0
    cdef bint have = False
    winners = []
    try:
        for i in range(ng):
            bm[i] = <uint64_t> ballot_masks[i]
            w[i] = <int64_t> weights[i]
            sz[i] = <int> sizes[i]
        for y in range(ymax + 1):
            row = table[y]
            for x in range(ymax + 1):
                tab[y * (ymax + 1) + x] = <int64_t> row[x] if x < len(row) else 0
        mask = ((<uint64_t> 1) << k) - 1
        limit = (<uint64_t> 1) << m
        while mask < limit:
            score = 0
            for i in range(ng):
                score += w[i] * tab[sz[i] * (ymax + 1) + _popcount(mask & bm[i])]
            if not have or score > best:
                best = score
                have = True
                winners = [mask]
            elif score == best:
                winners.append(mask)
            low = mask & (~mask + 1)
            ripple = mask + low
            mask = (((ripple ^ mask) >> 2) // low) | ripple
    finally:
        free(bm)
        free(w)
        free(sz)
        free(tab)
    return best, winners


cdef bint _search(uint64_t avail, uint64_t* adj, int need) nogil:
    cdef uint64_t rest, low, bit
    cdef int v, deg, best_v = -1, best_deg = -1
    if need <= 0:
        return True
    if _popcount(avail) < need:
        return False
    rest = avail
    while rest:
        low = rest & (~rest + 1)
        v = __builtin_ctzll(low)
        rest ^= low
        deg = _popcount(adj[v] & avail)
        if deg <= 1:
            return _search(avail & ~(adj[v] | low), adj, need - 1)
        if deg > best_deg:
            best_v = v
            best_deg = deg
    bit = (<uint64_t> 1) << best_v
    if _search(avail & ~(adj[best_v] | bit), adj, need - 1):
        return True
    return _search(avail & ~bit, adj, need)


def has_independent_set(int n, adj, int t):
    cdef uint64_t* a = <uint64_t*> malloc(max(n, 1) * sizeof(uint64_t))
    cdef Py_ssize_t i
    cdef uint64_t full
    cdef bint res
    try:
        for i in range(n):
            a[i] = <uint64_t> adj[i]
        full = ((<uint64_t> 1) << n) - 1 if n < 64 else <uint64_t> -1
        with nogil:
            res = _search(full, a, t)
    finally:
        free(a)
    return res
