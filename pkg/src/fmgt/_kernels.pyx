# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled shortest-path kernels over CSR adjacency arrays."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.math cimport INFINITY

cnp.import_array()


cdef inline bint _less(double da, long va, double db, long vb) nogil:
    return da < db or (da == db and va < vb)


cdef long _sssp(const long[::1] indptr, const long[::1] indices,
                const double[::1] weights, long source,
                double[::1] dist, long[::1] order) nogil:
    """Binary-heap Dijkstra with lazy deletion; heap keyed on (dist, vertex)."""
    cdef long n = indptr.shape[0] - 1
    cdef long cap = indices.shape[0] + 1
    cdef double* hk = <double*> malloc(cap * sizeof(double))
    cdef long* hv = <long*> malloc(cap * sizeof(long))
    cdef char* done = <char*> malloc(n * sizeof(char))
    cdef long size = 0, i, j, c, u, v, e, rank = 0, tv
    cdef double du, nd, tk
    for i in range(n):
        dist[i] = INFINITY
        order[i] = -1
        done[i] = 0
    dist[source] = 0.0
    hk[0] = 0.0
    hv[0] = source
    size = 1
    while size > 0:
        du = hk[0]
        u = hv[0]
        size -= 1
        if size > 0:
            tk = hk[size]
            tv = hv[size]
            i = 0
            while True:
                c = 2 * i + 1
                if c >= size:
                    break
                if c + 1 < size and _less(hk[c + 1], hv[c + 1], hk[c], hv[c]):
                    c += 1
                if _less(hk[c], hv[c], tk, tv):
                    hk[i] = hk[c]
                    hv[i] = hv[c]
                    i = c
                else:
                    break
            hk[i] = tk
            hv[i] = tv
        if done[u]:
            continue
        done[u] = 1
        order[u] = rank
        rank += 1
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if done[v]:
                continue
            nd = du + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                i = size
                size += 1
                while i > 0:
                    j = (i - 1) // 2
                    if _less(nd, v, hk[j], hv[j]):
                        hk[i] = hk[j]
                        hv[i] = hv[j]
                        i = j
                    else:
                        break
                hk[i] = nd
                hv[i] = v
    free(hk)
    free(hv)
    free(done)
    return rank


def dijkstra(indptr, indices, weights, long source):
    """Distances from ``source``; unreachable vertices get ``inf``."""
    cdef long n = indptr.shape[0] - 1
    dist = np.empty(n, dtype=np.float64)
    order = np.empty(n, dtype=np.int64)
    cdef const long[::1] ip = indptr
    cdef const long[::1] ix = indices
    cdef const double[::1] w = weights
    cdef double[::1] d = dist
    cdef long[::1] o = order
    with nogil:
        _sssp(ip, ix, w, source, d, o)
    return dist


def dijkstra_order(indptr, indices, weights, long source):
    """Distances plus settle rank per vertex (-1 when unreachable)."""
    cdef long n = indptr.shape[0] - 1
    dist = np.empty(n, dtype=np.float64)
    order = np.empty(n, dtype=np.int64)
    cdef const long[::1] ip = indptr
    cdef const long[::1] ix = indices
    cdef const double[::1] w = weights
    cdef double[::1] d = dist
    cdef long[::1] o = order
    with nogil:
        _sssp(ip, ix, w, source, d, o)
    return dist, order


def dijkstra_many(indptr, indices, weights, sources):
    """Row ``i`` holds the distances from ``sources[i]``."""
    cdef long n = indptr.shape[0] - 1
    src = np.ascontiguousarray(sources, dtype=np.int64)
    cdef long k = src.shape[0], i
    out = np.empty((k, n), dtype=np.float64)
    scratch = np.empty(n, dtype=np.int64)
    cdef const long[::1] ip = indptr
    cdef const long[::1] ix = indices
    cdef const double[::1] w = weights
    cdef double[:, ::1] d = out
    cdef long[::1] o = scratch
    cdef const long[::1] s = src
    with nogil:
        for i in range(k):
            _sssp(ip, ix, w, s[i], d[i], o)
    return out
