"""Synthetic instances: Waxman topologies and stochastic block models."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError, _as_rng


@dataclass(frozen=True)
class BlockAssignment:
    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if len(labels) and (labels.min() < 0 or labels.max() >= self.k):
            raise ValueError("block labels must lie in 0..k-1")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    def membership(self) -> np.ndarray:
        """One-hot membership matrix (one 1 per row)."""
        c = np.zeros((len(self.labels), self.k))
        c[np.arange(len(self.labels)), self.labels] = 1.0
        return c


def waxman_points(n: int, side: float, rng) -> np.ndarray:
    return _as_rng(rng).uniform(0.0, side, size=(n, 2))


def gen_waxman(n: int, alpha: float = 0.3, beta: float = 0.1, side: float = 100.0, rng=None,
               *, keep_all: bool = False, return_points: bool = False):
    """Waxman graph on ``n`` uniform points in ``[0, side]^2``.

    Pairs connect with probability ``beta * exp(-d / (alpha * side * sqrt(2)))``;
    edge weight is the Euclidean distance. The largest connected component is
    returned unless ``keep_all``.
    """
    if n < 1:
        raise GraphError("n must be at least 1")
    if side <= 0 or alpha <= 0 or not (0 <= beta <= 1):
        raise GraphError("need side > 0, alpha > 0, 0 <= beta <= 1")
    rng = _as_rng(rng)
    pts = waxman_points(n, side, rng)
    iu, ju = np.triu_indices(n, k=1)
    d = np.hypot(*(pts[iu] - pts[ju]).T)
    prob = beta * np.exp(-d / (alpha * side * math.sqrt(2.0)))
    hit = rng.random(len(d)) < prob
    g = Graph(n, iu[hit], ju[hit], d[hit])
    if not keep_all:
        g, ids = g.largest_component()
        pts = pts[ids]
    return (g, pts) if return_points else g


def sbm_image(k: int, p: float, model: int, rng, *, dense: bool = False) -> np.ndarray:
    """Block-density matrix for the two generative models.

    Model 1: every block links strongly (``10p``) to two other random blocks and
    weakly (``p``) elsewhere, itself included; the relation is symmetrised.
    Model 2: each entry is ``c*p`` with integer ``c`` uniform in ``[1, 10]``.
    ``dense`` flips every entry to ``1 - M``.
    """
    rng = _as_rng(rng)
    if p <= 0 or 10 * p > 1:
        raise GraphError("need 0 < p and 10p <= 1")
    if model == 1:
        image = np.full((k, k), p)
        for i in range(k):
            others = [j for j in range(k) if j != i]
            if not others:
                continue
            for j in rng.choice(others, size=min(2, len(others)), replace=False):
                image[i, j] = image[j, i] = 10 * p
    elif model == 2:
        c = rng.integers(1, 11, size=(k, k))
        c = np.triu(c) + np.triu(c, 1).T
        image = c * p
    else:
        raise GraphError("model must be 1 or 2")
    return 1.0 - image if dense else image


def sample_sbm(labels: np.ndarray, image: np.ndarray, rng, noise: float = 0.0) -> Graph:
    """Independent edges with probability ``image[c_u, c_v]``; optional symmetric flip noise."""
    rng = _as_rng(rng)
    labels = np.asarray(labels, dtype=np.int64)
    n = len(labels)
    if np.any(image < 0) or np.any(image > 1):
        raise GraphError("image entries must be probabilities")
    iu, ju = np.triu_indices(n, k=1)
    hit = rng.random(len(iu)) < image[labels[iu], labels[ju]]
    if noise > 0:
        hit ^= rng.random(len(iu)) < noise
    return Graph(n, iu[hit], ju[hit], np.ones(int(hit.sum())), _validated=True)


def gen_sbm(n: int, k: int, p: float, model: int = 1, rng=None, *, dense: bool = False,
            noise: bool = False, image: np.ndarray | None = None, return_image: bool = False):
    """Stochastic block model instance and its planted assignment.

    Memberships are uniform over ``k`` blocks. ``noise`` flips every adjacency
    entry independently with probability ``0.05 / n``. Passing ``image``
    overrides the generated density matrix.
    """
    if k < 1 or n < 1:
        raise GraphError("need n >= 1 and k >= 1")
    rng = _as_rng(rng)
    labels = rng.integers(0, k, size=n)
    if image is None:
        image = sbm_image(k, p, model, rng, dense=dense)
    image = np.asarray(image, dtype=float)
    g = sample_sbm(labels, image, rng, noise=0.05 / n if noise else 0.0)
    truth = BlockAssignment(labels, k)
    return (g, truth, image) if return_image else (g, truth)


def expected_sbm_edges(labels: np.ndarray, image: np.ndarray) -> tuple[float, float]:
    """Mean and variance of the edge count for fixed memberships and image."""
    k = image.shape[0]
    sizes = np.bincount(labels, minlength=k).astype(float)
    pairs = np.outer(sizes, sizes)
    pairs[np.diag_indices(k)] = sizes * (sizes - 1) / 2
    upper = np.triu(np.ones((k, k), dtype=bool))
    mean = float(np.sum(pairs[upper] * image[upper]))
    var = float(np.sum(pairs[upper] * image[upper] * (1 - image[upper])))
    return mean, var


def planted_cliques(sizes, bridges=1) -> tuple[Graph, BlockAssignment]:
    """Disjoint cliques of the given sizes, consecutive ones joined by ``bridges`` edges."""
    edges = []
    labels = []
    start = 0
    starts = []
    for b, s in enumerate(sizes):
        starts.append(start)
        for i in range(s):
            for j in range(i + 1, s):
                edges.append((start + i, start + j))
        labels += [b] * s
        start += s
    for b in range(len(sizes) - 1):
        for r in range(bridges):
            edges.append((starts[b] + r, starts[b + 1] + r))
    return Graph.from_edges(start, edges), BlockAssignment(np.array(labels), len(sizes))


def random_connected_graph(n: int, extra_edges: int, rng, weights=(1, 10), integer=True) -> Graph:
    """Random spanning tree plus ``extra_edges`` random chords, weights uniform in ``weights``."""
    rng = _as_rng(rng)
    perm = rng.permutation(n)
    edges = set()
    for i in range(1, n):
        a, b = int(perm[i]), int(perm[rng.integers(0, i)])
        edges.add((min(a, b), max(a, b)))
    target = min(n * (n - 1) // 2, len(edges) + extra_edges)
    while len(edges) < target:
        a, b = (int(x) for x in rng.integers(0, n, size=2))
        if a != b:
            edges.add((min(a, b), max(a, b)))
    edges = sorted(edges)
    lo, hi = weights
    if integer:
        w = rng.integers(lo, hi + 1, size=len(edges)).astype(float)
    else:
        w = rng.uniform(lo, hi, size=len(edges))
    return Graph(n, [e[0] for e in edges], [e[1] for e in edges], w)


def random_tree(n: int, rng=None, weights=(1, 10)) -> Graph:
    """Uniform random labelled tree (Pruefer sequence) with integer weights uniform in ``weights``."""
    rng = _as_rng(rng)
    if n < 1:
        raise GraphError("n must be at least 1")
    if n == 1:
        return Graph(1, [], [], [])
    if n == 2:
        return Graph(2, [0], [1], [float(rng.integers(weights[0], weights[1] + 1))])
    seq = rng.integers(0, n, size=n - 2)
    degree = np.ones(n, dtype=np.int64)
    np.add.at(degree, seq, 1)
    leaves = [int(i) for i in np.flatnonzero(degree == 1)]
    heapq.heapify(leaves)
    u, v = [], []
    for x in seq.tolist():
        leaf = heapq.heappop(leaves)
        u.append(leaf)
        v.append(x)
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    a, b = heapq.heappop(leaves), heapq.heappop(leaves)
    u.append(a)
    v.append(b)
    w = rng.integers(weights[0], weights[1] + 1, size=n - 1).astype(float)
    return Graph(n, u, v, w)


def small_world(n: int, k: int = 4, p: float = 0.1, rng=None) -> Graph:
    """Newman-Watts-Strogatz graph: ring lattice to ``k//2`` neighbours each side plus shortcuts.

    Every lattice edge ``(i, j)`` spawns a shortcut from ``i`` to a uniformly
    random vertex with probability ``p``; unit weights.
    """
    rng = _as_rng(rng)
    if n < 3 or k < 2 or k >= n:
        raise GraphError("need n >= 3 and 2 <= k < n")
    edges = set()
    for i in range(n):
        for s in range(1, k // 2 + 1):
            j = (i + s) % n
            edges.add((min(i, j), max(i, j)))
    for a, _ in sorted(edges):
        if rng.random() < p:
            c = int(rng.integers(n))
            if c != a:
                edges.add((min(a, c), max(a, c)))
    edges = sorted(edges)
    return Graph(n, [e[0] for e in edges], [e[1] for e in edges], np.ones(len(edges)))


def random_grid(height: int, width: int, obstacle_density: float = 0.2, rng=None,
                *, eight_connected: bool = False) -> Graph:
    """Largest component of a grid map with uniformly random obstacle cells."""
    from .io import parse_grid_map

    rng = _as_rng(rng)
    blocked = rng.random((height, width)) < obstacle_density
    text = "\n".join("".join("@" if b else "." for b in row) for row in blocked)
    return parse_grid_map(text, eight_connected=eight_connected)[0]
