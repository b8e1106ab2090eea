"""Pure-Python shortest-path kernels; same contract as the compiled module."""

import heapq

import numpy as np


def dijkstra_order(indptr, indices, weights, source):
    n = len(indptr) - 1
    dist = np.full(n, np.inf)
    order = np.full(n, -1, dtype=np.int64)
    ip = indptr.tolist()
    ix = indices.tolist()
    w = weights.tolist()
    best = [float("inf")] * n
    best[source] = 0.0
    done = [False] * n
    heap = [(0.0, source)]
    rank = 0
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        order[u] = rank
        rank += 1
        for e in range(ip[u], ip[u + 1]):
            v = ix[e]
            if done[v]:
                continue
            nd = du + w[e]
            if nd < best[v]:
                best[v] = nd
                heapq.heappush(heap, (nd, v))
    dist[:] = best
    return dist, order


def dijkstra(indptr, indices, weights, source):
    return dijkstra_order(indptr, indices, weights, source)[0]


def dijkstra_many(indptr, indices, weights, sources):
    sources = np.asarray(sources, dtype=np.int64)
    out = np.empty((len(sources), len(indptr) - 1))
    for i, s in enumerate(sources.tolist()):
        out[i] = dijkstra(indptr, indices, weights, s)
    return out
