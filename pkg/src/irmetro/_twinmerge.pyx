# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin-merge kernel.

Same contract and same deterministic pair order as _twinmerge_py; neighbor
sets live in flat C bitset rows so the inner comparison is a word loop.
"""

from libc.stdlib cimport calloc, free
from libc.stdint cimport uint64_t, int64_t

BACKEND = "cython"


cdef inline bint _rows_equal(uint64_t* adj, Py_ssize_t w, Py_ssize_t i, Py_ssize_t j) nogil:
    """Compare rows i and j with the bits for i and j masked out of both."""
    cdef Py_ssize_t wi = i >> 6
    cdef Py_ssize_t wj = j >> 6
    cdef uint64_t bit_i = (<uint64_t>1) << (i & 63)
    cdef uint64_t bit_j = (<uint64_t>1) << (j & 63)
    cdef Py_ssize_t word
    cdef uint64_t mask
    cdef uint64_t* ri = adj + i * w
    cdef uint64_t* rj = adj + j * w
    for word in range(w):
        mask = ~(<uint64_t>0)
        if word == wi:
            mask &= ~bit_i
        if word == wj:
            mask &= ~bit_j
        if (ri[word] & mask) != (rj[word] & mask):
            return False
    return True


def twin_merge_partition(groups, neighbors, int max_passes=0):
    """See _twinmerge_py.twin_merge_partition; identical semantics."""
    cdef Py_ssize_t n = len(groups)
    parent_list = list(range(n))
    if n == 0:
        return parent_list

    cdef Py_ssize_t w = (n + 63) >> 6
    cdef uint64_t* adj = <uint64_t*>calloc(n * w, sizeof(uint64_t))
    cdef int64_t* parent = <int64_t*>calloc(n, sizeof(int64_t))
    cdef char* alive = <char*>calloc(n, sizeof(char))
    # bucket_items: node indices grouped by compatibility class, ascending
    # inside each bucket; bucket_of[i] gives the slice for node i.
    cdef int64_t* bucket_items = <int64_t*>calloc(n, sizeof(int64_t))
    cdef int64_t* bucket_start = NULL
    cdef int64_t* bucket_end = NULL
    cdef int64_t* bucket_of = <int64_t*>calloc(n, sizeof(int64_t))
    if adj == NULL or parent == NULL or alive == NULL or bucket_items == NULL or bucket_of == NULL:
        free(adj); free(parent); free(alive); free(bucket_items); free(bucket_of)
        raise MemoryError()

    cdef Py_ssize_t i, j, k, pos
    cdef dict gid_map = {}
    cdef list order
    try:
        for i in range(n):
            parent[i] = i
            alive[i] = 1
            for nb in neighbors[i]:
                j = nb
                adj[i * w + (j >> 6)] |= (<uint64_t>1) << (j & 63)

        for i in range(n):
            gid = groups[i]
            if gid not in gid_map:
                gid_map[gid] = []
            (<list>gid_map[gid]).append(i)
        n_buckets = len(gid_map)
        bucket_start = <int64_t*>calloc(n_buckets, sizeof(int64_t))
        bucket_end = <int64_t*>calloc(n_buckets, sizeof(int64_t))
        if bucket_start == NULL or bucket_end == NULL:
            raise MemoryError()
        pos = 0
        b = 0
        for gid, order in gid_map.items():
            bucket_start[b] = pos
            for i in order:
                bucket_items[pos] = i
                bucket_of[i] = b
                pos += 1
            bucket_end[b] = pos
            b += 1

        _run(adj, parent, alive, bucket_items, bucket_start, bucket_end, bucket_of, n, w, max_passes)

        for i in range(n):
            k = i
            while parent[k] != k:
                k = parent[k]
            parent_list[i] = k
        return parent_list
    finally:
        free(adj); free(parent); free(alive); free(bucket_items); free(bucket_of)
        free(bucket_start); free(bucket_end)


cdef void _run(uint64_t* adj, int64_t* parent, char* alive,
               int64_t* bucket_items, int64_t* bucket_start, int64_t* bucket_end,
               int64_t* bucket_of, Py_ssize_t n, Py_ssize_t w, int max_passes) nogil:
    cdef Py_ssize_t i, j, k, b, p, word
    cdef uint64_t m, bit_j
    cdef bint changed
    cdef int passes = 0
    while True:
        passes += 1
        changed = False
        for i in range(n):
            if not alive[i]:
                continue
            b = bucket_of[i]
            if bucket_end[b] - bucket_start[b] < 2:
                continue
            for p in range(bucket_start[b], bucket_end[b]):
                j = bucket_items[p]
                if j <= i or not alive[j]:
                    continue
                if not _rows_equal(adj, w, i, j):
                    continue
                # merge j into i: clear bit j from every neighbor's row
                bit_j = (<uint64_t>1) << (j & 63)
                for word in range(w):
                    m = adj[j * w + word]
                    while m:
                        k = (word << 6) + _ctz(m)
                        adj[k * w + (j >> 6)] &= ~bit_j
                        m &= m - 1
                for word in range(w):
                    adj[j * w + word] = 0
                alive[j] = 0
                parent[j] = i
                changed = True
        if not changed:
            break
        if max_passes and passes >= max_passes:
            break


cdef inline int _ctz(uint64_t x) nogil:
    cdef int c = 0
    while not (x & 1):
        x >>= 1
        c += 1
    return c
