"""FastMap embedding of graph vertices under pluggable distance modes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .graph import Graph, GraphError, _as_rng, _check_vertex, complement_sampled


@dataclass(frozen=True)
class ShortestPath:
    def describe(self) -> dict:
        return {"kind": "sp"}


@dataclass(frozen=True)
class SqrtShortestPath:
    def describe(self) -> dict:
        return {"kind": "sqrt-sp"}


@dataclass(frozen=True)
class Paspd:
    """Probabilistically amplified shortest-path distances over an edge-dropping ensemble."""

    L: int = 4
    F: int = 10
    use_complement: bool = True
    sqrt: bool = False

    def __post_init__(self):
        if self.L < 1 or self.F < 1:
            raise ValueError("Paspd needs L >= 1 and F >= 1")

    def describe(self) -> dict:
        return {"kind": "paspd", "L": self.L, "F": self.F,
                "use_complement": self.use_complement, "sqrt": self.sqrt}


DistanceMode = ShortestPath | SqrtShortestPath | Paspd


@dataclass(frozen=True)
class EmbedConfig:
    kappa: int = 4
    epsilon: float = 1e-4
    q_max: int = 10
    mode: DistanceMode = field(default_factory=ShortestPath)

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.q_max < 1:
            raise ValueError("q_max must be >= 1")


@dataclass(frozen=True, eq=False)
class Embedding:
    """Coordinates for the embedded vertices; row ``i`` belongs to ``vertices[i]``."""

    coords: np.ndarray
    vertices: np.ndarray
    pivots: tuple
    pivot_residuals: tuple
    mode: DistanceMode
    seed: int | None
    n_graph: int

    @property
    def kappa_used(self) -> int:
        return self.coords.shape[1]

    def row_index(self) -> np.ndarray:
        """Vertex id -> row, -1 for vertices outside the embedding."""
        idx = -np.ones(self.n_graph, dtype=np.int64)
        idx[self.vertices] = np.arange(len(self.vertices))
        return idx

    def point(self, v: int) -> np.ndarray:
        r = self.row_index()[v] if 0 <= v < self.n_graph else -1
        if r < 0:
            raise GraphError(f"vertex {v} is not embedded")
        return self.coords[r]

    def restrict(self, vertices) -> Embedding:
        """Rows for a subset of the embedded vertices (same coordinates)."""
        vertices = np.unique(np.asarray(vertices, dtype=np.int64))
        rows = self.row_index()[vertices]
        if np.any(rows < 0):
            raise GraphError("restriction holds vertices that are not embedded")
        return Embedding(self.coords[rows], vertices, self.pivots, self.pivot_residuals,
                         self.mode, self.seed, self.n_graph)


def coordinate(d2_ai: float, d2_ab: float, d2_ib: float) -> float:
    if d2_ab <= 0:
        raise ValueError("degenerate pivot pair: d2_ab must be > 0")
    return (d2_ai + d2_ab - d2_ib) / (2.0 * math.sqrt(d2_ab))


def residual_sq(d2_raw, pi, pj):
    diff = np.asarray(pi, dtype=float) - np.asarray(pj, dtype=float)
    if diff.shape[-1:] != np.shape(pj)[-1:]:
        raise ValueError("coordinate prefixes differ in length")
    return np.maximum(d2_raw - np.sum(diff * diff, axis=-1), 0.0)


@dataclass(frozen=True, eq=False)
class PaspdEnsemble:
    graphs: tuple
    seed: int | None = None


def _drop_lineage(start: Graph, F: int, rng) -> list:
    out = [start]
    m = start.m
    if m == 0:
        return out
    f = math.ceil(m / F)
    order = rng.permutation(m)
    keep = np.ones(m, dtype=bool)
    for pos in range(0, m, f):
        keep[order[pos:pos + f]] = False
        out.append(start.edge_subgraph(keep.copy()))
    return out


def build_paspd_ensemble(g: Graph, L: int = 4, F: int = 10, use_complement: bool = True,
                         rng=None) -> PaspdEnsemble:
    """``L`` lineages of nested edge-induced subgraphs, each dropping ``ceil(|E|/F)`` edges per step.

    With ``use_complement`` each lineage also walks down from a sampled
    complement graph, whose step uses its own edge count.
    """
    if L < 1 or F < 1:
        raise ValueError("need L >= 1 and F >= 1")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    rng = _as_rng(rng)
    graphs = []
    for _ in range(L):
        graphs += _drop_lineage(g, F, rng)
        if use_complement:
            graphs += _drop_lineage(complement_sampled(g, rng), F, rng)
    return PaspdEnsemble(tuple(graphs), seed)


def ss_paspd(g: Graph, ensemble: PaspdEnsemble, s: int) -> np.ndarray:
    """Summed distances from ``s`` over the ensemble.

    Vertices unreachable in a member contribute twice the largest finite
    distance from ``s`` in that member.
    """
    s = _check_vertex(g, s)
    total = np.zeros(g.n)
    for h in ensemble.graphs:
        if h.n != g.n:
            raise GraphError("ensemble built over a different vertex set")
        d = kernels.dijkstra(h.indptr, h.indices, h.weights, s)
        finite = np.isfinite(d)
        if not finite.all():
            d = np.where(finite, d, 2.0 * d[finite].max())
        total += d
    return total


def _patch_unreachable(d: np.ndarray) -> np.ndarray:
    finite = np.isfinite(d)
    if finite.all():
        return d
    return np.where(finite, d, 2.0 * d[finite].max())


class DistanceProvider:
    """Cached mode distances (not squared) from single sources over all of ``g``."""

    def __init__(self, g: Graph, mode: DistanceMode, rng=None, ensemble: PaspdEnsemble | None = None):
        self.g = g
        self.mode = mode
        self.ensemble = ensemble
        if isinstance(mode, Paspd) and ensemble is None:
            self.ensemble = build_paspd_ensemble(g, mode.L, mode.F, mode.use_complement, rng)
        self._cache: dict[int, np.ndarray] = {}

    def row(self, s: int) -> np.ndarray:
        s = int(s)
        hit = self._cache.get(s)
        if hit is not None:
            return hit
        g, mode = self.g, self.mode
        if isinstance(mode, Paspd):
            d = ss_paspd(g, self.ensemble, s)
            if mode.sqrt:
                d = np.sqrt(d)
        else:
            d = _patch_unreachable(kernels.dijkstra(g.indptr, g.indices, g.weights, _check_vertex(g, s)))
            if isinstance(mode, SqrtShortestPath):
                d = np.sqrt(d)
        d.setflags(write=False)
        self._cache[s] = d
        return d

    def matrix(self, vertices) -> np.ndarray:
        vertices = np.asarray(vertices, dtype=np.int64)
        return np.vstack([self.row(v)[vertices] for v in vertices]) if len(vertices) else np.zeros((0, 0))


def embed(g: Graph, cfg: EmbedConfig | None = None, rng=None, mask=None,
          provider: DistanceProvider | None = None) -> Embedding:
    """FastMap with the pivot-changing heuristic.

    With ``mask`` only the listed vertices get pivots and coordinates, while
    distances still run over all of ``g``. Stops early once the residual
    pivot distance drops below ``epsilon``.
    """
    cfg = cfg or EmbedConfig()
    if g.n == 0:
        raise GraphError("cannot embed an empty graph")
    seed = int(rng) if isinstance(rng, (int, np.integer)) else None
    rng = _as_rng(rng)
    if mask is None:
        verts = np.arange(g.n, dtype=np.int64)
    else:
        verts = np.unique(np.asarray(mask, dtype=np.int64))
        if len(verts) == 0:
            raise GraphError("empty mask")
        for v in (verts[0], verts[-1]):
            _check_vertex(g, v)
    if provider is None:
        provider = DistanceProvider(g, cfg.mode, rng)
    elif provider.g is not g or provider.mode != cfg.mode:
        raise ValueError("distance provider does not match graph and mode")
    row_of = {int(v): i for i, v in enumerate(verts)}
    nv = len(verts)
    P = np.zeros((nv, cfg.kappa))
    pivots, residuals = [], []

    def sq(v):
        d = provider.row(v)[verts]
        return d * d

    def resid(v, r):
        return residual_sq(sq(v), P[:, :r], P[row_of[v], :r])

    r = 0
    if nv >= 2:
        for r in range(cfg.kappa + 1):
            if r == cfg.kappa:
                break
            a = int(verts[rng.integers(nv)])
            b = a
            for _ in range(cfg.q_max):
                c = int(verts[int(np.argmax(resid(a, r)))])
                if c == b:
                    break
                b, a = a, c
            d_a = resid(a, r)
            d_ab = float(d_a[row_of[b]])
            if d_ab < cfg.epsilon:
                break
            d_b = resid(b, r)
            # the PASPD fallback is source dependent, so d(b, a) may differ from d(a, b)
            d_b[row_of[a]] = d_ab
            P[:, r] = (d_a + d_ab - d_b) / (2.0 * math.sqrt(d_ab))
            pivots.append((a, b))
            residuals.append(d_ab)
    coords = np.ascontiguousarray(P[:, :r])
    coords.setflags(write=False)
    verts.setflags(write=False)
    return Embedding(coords, verts, tuple(pivots), tuple(residuals), cfg.mode, seed, g.n)


def euclidean_distance(e: Embedding, i: int, j: int) -> float:
    return float(np.linalg.norm(e.point(i) - e.point(j)))
