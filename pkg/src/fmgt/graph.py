"""Undirected edge-weighted graphs and the shortest-path machinery built on them."""

from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels

# Relative tolerance when deciding whether an edge is tight on a shortest path.
TIGHT_RTOL = 1e-9


class GraphError(ValueError):
    """Invalid graph input (self-loop, duplicate/directed edge, negative weight, bad id)."""


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def worker_count() -> int:
    """Worker cap for batched Dijkstra runs, from ``FMGT_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("FMGT_THREADS", "1")))
    except ValueError:
        return 1


class Graph:
    """Immutable undirected graph on vertices ``0..n-1``.

    Edges are stored once with ``u < v`` and mirrored into a CSR adjacency for
    the kernels. ``vertex_weights`` is optional (weighted K-median).
    """

    __slots__ = ("n", "u", "v", "w", "indptr", "indices", "weights", "vertex_weights", "_edge_keys")

    def __init__(self, n, u, v, w, vertex_weights=None, *, _validated=False):
        n = int(n)
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        if not _validated:
            if n < 0:
                raise GraphError("vertex count must be non-negative")
            if not (len(u) == len(v) == len(w)):
                raise GraphError("edge arrays differ in length")
            if len(u) and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
                raise GraphError("edge endpoint outside 0..n-1")
            if np.any(u == v):
                raise GraphError("self-loops are not allowed")
            if np.any(~np.isfinite(w)) or np.any(w < 0):
                raise GraphError("edge weights must be finite and non-negative")
            lo = np.minimum(u, v)
            hi = np.maximum(u, v)
            keys = lo * n + hi
            uniq, counts = np.unique(keys, return_counts=True)
            if np.any(counts > 1):
                k = int(uniq[np.argmax(counts > 1)])
                raise GraphError(f"duplicate or directed edge between {k // n} and {k % n}")
            u, v = lo, hi
            order = np.argsort(keys, kind="stable")
            u, v, w = u[order], v[order], w[order]
        if vertex_weights is not None:
            vertex_weights = np.asarray(vertex_weights, dtype=np.float64)
            if vertex_weights.shape != (n,):
                raise GraphError("vertex weights must have one entry per vertex")
            if np.any(vertex_weights < 0):
                raise GraphError("vertex weights must be non-negative")
            vertex_weights.setflags(write=False)
        self.n = n
        self.u, self.v, self.w = u, v, w
        self.vertex_weights = vertex_weights
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        ww = np.concatenate([w, w])
        order = np.lexsort((dst, src))
        self.indices = np.ascontiguousarray(dst[order])
        self.weights = np.ascontiguousarray(ww[order])
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=self.indptr[1:])
        self._edge_keys = None
        for arr in (self.u, self.v, self.w, self.indices, self.weights, self.indptr):
            arr.setflags(write=False)

    @classmethod
    def from_edges(cls, n, edges, vertex_weights=None) -> Graph:
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples; missing weights default to 1."""
        edges = list(edges)
        u = [int(e[0]) for e in edges]
        v = [int(e[1]) for e in edges]
        w = [float(e[2]) if len(e) > 2 else 1.0 for e in edges]
        return cls(n, u, v, w, vertex_weights)

    @property
    def m(self) -> int:
        return len(self.u)

    def edges(self):
        return list(zip(self.u.tolist(), self.v.tolist(), self.w.tolist()))

    def neighbors(self, x: int) -> np.ndarray:
        return self.indices[self.indptr[x]:self.indptr[x + 1]]

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edge_keys(self) -> np.ndarray:
        """Sorted ``u * n + v`` codes of the stored edges."""
        if self._edge_keys is None:
            keys = self.u * self.n + self.v
            keys.setflags(write=False)
            self._edge_keys = keys
        return self._edge_keys

    def has_edge(self, a: int, b: int) -> bool:
        lo, hi = min(a, b), max(a, b)
        keys = self.edge_keys()
        i = np.searchsorted(keys, lo * self.n + hi)
        return bool(i < len(keys) and keys[i] == lo * self.n + hi)

    def is_unweighted(self) -> bool:
        return bool(np.all(self.w == 1.0))

    def with_unit_weights(self) -> Graph:
        return Graph(self.n, self.u, self.v, np.ones(self.m), self.vertex_weights, _validated=True)

    def with_vertex_weights(self, vertex_weights) -> Graph:
        return Graph(self.n, self.u, self.v, self.w, vertex_weights, _validated=True)

    def edge_subgraph(self, keep: np.ndarray) -> Graph:
        """Same vertex set, only the edges selected by the boolean mask ``keep``."""
        return Graph(self.n, self.u[keep], self.v[keep], self.w[keep], self.vertex_weights, _validated=True)

    def components(self) -> np.ndarray:
        """Connected-component label per vertex (labels ordered by smallest member)."""
        label = np.full(self.n, -1, dtype=np.int64)
        ip, ix = self.indptr, self.indices
        c = 0
        for s in range(self.n):
            if label[s] >= 0:
                continue
            label[s] = c
            stack = [s]
            while stack:
                x = stack.pop()
                for y in ix[ip[x]:ip[x + 1]].tolist():
                    if label[y] < 0:
                        label[y] = c
                        stack.append(y)
            c += 1
        return label

    def is_connected(self) -> bool:
        return self.n <= 1 or int(self.components().max()) == 0

    def induced_subgraph(self, vertices) -> tuple[Graph, np.ndarray]:
        """Subgraph on ``vertices`` relabelled to ``0..k-1``; also returns the old ids."""
        vertices = np.unique(np.asarray(vertices, dtype=np.int64))
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[vertices] = np.arange(len(vertices))
        keep = (remap[self.u] >= 0) & (remap[self.v] >= 0)
        vw = None if self.vertex_weights is None else self.vertex_weights[vertices]
        g = Graph(len(vertices), remap[self.u[keep]], remap[self.v[keep]], self.w[keep], vw, _validated=True)
        return g, vertices

    def largest_component(self) -> tuple[Graph, np.ndarray]:
        """Largest connected component (ties: the one holding the smallest id)."""
        if self.n == 0:
            return self, np.arange(0)
        label = self.components()
        sizes = np.bincount(label)
        return self.induced_subgraph(np.flatnonzero(label == int(np.argmax(sizes))))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        same_vw = (self.vertex_weights is None and other.vertex_weights is None) or (
            self.vertex_weights is not None
            and other.vertex_weights is not None
            and np.array_equal(self.vertex_weights, other.vertex_weights)
        )
        return (
            self.n == other.n
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.w, other.w)
            and same_vw
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def _check_vertex(g: Graph, s) -> int:
    if not (0 <= int(s) < g.n):
        raise GraphError(f"vertex {s} outside 0..{g.n - 1}")
    return int(s)


@dataclass(frozen=True)
class ShortestPathTree:
    source: int
    dist: np.ndarray


@dataclass(frozen=True)
class ShortestPathDictionary:
    """Distances from ``source`` plus, per vertex, the neighbours preceding it on some shortest path."""

    source: int
    dist: np.ndarray
    preds: list

    def reachable(self, t: int) -> bool:
        return bool(np.isfinite(self.dist[t]))


def shortest_path_tree(g: Graph, s: int) -> ShortestPathTree:
    s = _check_vertex(g, s)
    return ShortestPathTree(s, kernels.dijkstra(g.indptr, g.indices, g.weights, s))


def distances_from(g: Graph, sources) -> np.ndarray:
    """Distance rows for many sources, split across ``FMGT_THREADS`` workers."""
    sources = np.asarray(sources, dtype=np.int64)
    for s in sources.tolist():
        _check_vertex(g, s)
    workers = worker_count()
    if workers == 1 or len(sources) < 2 * workers:
        return kernels.dijkstra_many(g.indptr, g.indices, g.weights, sources)
    chunks = np.array_split(sources, workers)
    with ThreadPoolExecutor(workers) as pool:
        parts = pool.map(lambda c: kernels.dijkstra_many(g.indptr, g.indices, g.weights, c), chunks)
        return np.vstack(list(parts))


def all_pairs_distances(g: Graph) -> np.ndarray:
    return distances_from(g, np.arange(g.n))


def shortest_path_dictionary(g: Graph, s: int) -> ShortestPathDictionary:
    s = _check_vertex(g, s)
    dist, order = kernels.dijkstra_order(g.indptr, g.indices, g.weights, s)
    # directed arcs a -> b of the CSR
    a = np.repeat(np.arange(g.n), np.diff(g.indptr))
    b = g.indices
    da = dist[a]
    db = dist[b]
    ok = np.isfinite(da) & np.isfinite(db)
    tol = TIGHT_RTOL * np.maximum(1.0, np.abs(np.where(ok, db, 0.0)))
    with np.errstate(invalid="ignore"):
        gap = np.where(ok, da + g.weights - db, np.inf)
    tight = ok & (np.abs(gap) <= tol) & (order[a] < order[b])
    pa, pb = a[tight], b[tight]
    srt = np.lexsort((pa, pb))
    pa, pb = pa[srt], pb[srt]
    bounds = np.searchsorted(pb, np.arange(g.n + 1))
    plist = pa.tolist()
    preds = [plist[bounds[i]:bounds[i + 1]] for i in range(g.n)]
    return ShortestPathDictionary(s, dist, preds)


def _require_reachable(spd: ShortestPathDictionary, t: int):
    if not (0 <= t < len(spd.dist)):
        raise GraphError(f"vertex {t} outside 0..{len(spd.dist) - 1}")
    if not spd.reachable(t):
        raise GraphError(f"vertex {t} unreachable from {spd.source}")


def vertices_on_all_shortest_paths(spd: ShortestPathDictionary, t: int) -> set:
    """Backward closure over predecessors from ``t``: every vertex on some shortest source-t path."""
    t = int(t)
    _require_reachable(spd, t)
    preds = spd.preds
    seen = {t}
    stack = [t]
    while stack:
        x = stack.pop()
        for p in preds[x]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def pairs_on_all_shortest_paths(spd: ShortestPathDictionary, t: int) -> set:
    """Unordered pairs that share at least one shortest source-t path.

    Builds the predecessor DAG of the vertices that reach ``t``, then peels
    vertices with no remaining in-arcs one at a time, pairing each with all
    of its BFS descendants.
    """
    t = int(t)
    members = vertices_on_all_shortest_paths(spd, t)
    if len(members) <= 1:
        return set()
    children = {x: [] for x in members}
    indeg = dict.fromkeys(members, 0)
    for x in members:
        for p in spd.preds[x]:
            children[p].append(x)
            indeg[x] += 1
    ready = deque(sorted(x for x in members if indeg[x] == 0))
    pairs = set()
    while ready:
        x = ready.popleft()
        seen = {x}
        queue = deque(children[x])
        while queue:
            y = queue.popleft()
            if y in seen:
                continue
            seen.add(y)
            pairs.add((x, y) if x < y else (y, x))
            queue.extend(children[y])
        for y in children[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                ready.append(y)
    return pairs


def complement_edge_count(g: Graph) -> int:
    return g.n * (g.n - 1) // 2 - g.m


def _pair_index_to_uv(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Map linear indices over the strict upper triangle (row-major) to ``(u, v)``."""
    idx = np.asarray(idx, dtype=np.int64)
    # row u starts at u*n - u*(u+1)/2
    u = (n - 2 - np.floor(np.sqrt(-8.0 * idx + 4.0 * n * (n - 1) - 7) / 2.0 - 0.5)).astype(np.int64)
    start = u * n - u * (u + 1) // 2
    # guard floating error at row boundaries
    low = idx < start
    while np.any(low):
        u[low] -= 1
        start = u * n - u * (u + 1) // 2
        low = idx < start
    nxt = (u + 1) * n - (u + 1) * (u + 2) // 2
    high = idx >= nxt
    while np.any(high):
        u[high] += 1
        start = u * n - u * (u + 1) // 2
        nxt = (u + 1) * n - (u + 1) * (u + 2) // 2
        high = idx >= nxt
    v = idx - start + u + 1
    return u, v


def _uv_to_pair_index(u: np.ndarray, v: np.ndarray, n: int) -> np.ndarray:
    return u * n - u * (u + 1) // 2 + (v - u - 1)


def sample_non_edges(g: Graph, count: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """``count`` distinct non-adjacent pairs ``u < v`` drawn uniformly without replacement."""
    rng = _as_rng(rng)
    n = g.n
    total = n * (n - 1) // 2
    free = total - g.m
    if count > free:
        raise GraphError("not enough non-edges to sample")
    if count == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    taken = np.sort(_uv_to_pair_index(g.u, g.v, n))
    if total <= 5_000_000 or count > free // 4:
        # rank-select among the complement of the taken indices
        ranks = np.sort(rng.choice(free, size=count, replace=False))
        # the r-th free index is r + #taken indices <= it; solve by iteration
        idx = ranks.copy()
        while True:
            shift = np.searchsorted(taken, idx, side="right")
            nxt = ranks + shift
            if np.array_equal(nxt, idx):
                break
            idx = nxt
    else:
        chosen = np.zeros(0, dtype=np.int64)
        while len(chosen) < count:
            draw = rng.integers(0, total, size=2 * (count - len(chosen)) + 16)
            pos = np.searchsorted(taken, draw)
            hit = (pos < len(taken)) & (taken[np.minimum(pos, len(taken) - 1)] == draw) if len(taken) else np.zeros(len(draw), bool)
            draw = draw[~hit]
            chosen = np.concatenate([chosen, draw])
            _, first = np.unique(chosen, return_index=True)
            chosen = chosen[np.sort(first)]
        idx = chosen[:count]
    return _pair_index_to_uv(idx, n)


def complement_sampled(g: Graph, rng=None) -> Graph:
    """Unit-weight complement, thinned to at most ``|E|`` uniformly chosen edges.

    An edgeless input keeps its full complement.
    """
    rng = _as_rng(rng)
    free = complement_edge_count(g)
    keep = free if g.m == 0 else min(free, g.m)
    u, v = sample_non_edges(g, keep, rng)
    order = np.lexsort((v, u))
    u, v = u[order], v[order]
    return Graph(g.n, u, v, np.ones(len(u)), _validated=True)
