"""Top-K nearest neighbours over embedding points: hyperplane LSH and an exact scan."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .graph import _as_rng


@dataclass(frozen=True)
class Exact:
    pass


@dataclass(frozen=True)
class Lsh:
    tables: int = 16
    bits: int = 8
    seed: int = 0


class TruncatedResult(UserWarning):
    pass


@dataclass(frozen=True)
class QueryResult:
    ids: np.ndarray
    dists: np.ndarray
    truncated: bool


class NnIndex:
    """Index over embedding rows; answers are vertex ids from ``restriction`` (or every row).

    LSH hashes use random hyperplanes through random data points of the
    centered, scale-normalized cloud, probed at Hamming distance 0 and 1.
    Candidates are re-ranked by exact distance.
    """

    def __init__(self, points, ids, method=None):
        points = np.asarray(points, dtype=float)
        if points.ndim != 2:
            points = points.reshape(len(points), -1)
        ids = np.asarray(ids, dtype=np.int64)
        if len(ids) == 0:
            raise ValueError("index needs at least one point")
        order = np.argsort(ids, kind="stable")
        self.points = points[order].copy()
        self.ids = ids[order].copy()
        self.method = method or Exact()
        self.dim = self.points.shape[1]
        self._buckets = None
        if isinstance(self.method, Lsh):
            self._build_lsh()

    def __len__(self):
        return len(self.ids)

    def _build_lsh(self):
        m = self.method
        rng = _as_rng(m.seed)
        self._center = self.points.mean(axis=0)
        scale = np.abs(self.points - self._center).max() if self.points.size else 0.0
        self._scale = scale if scale > 0 else 1.0
        x = (self.points - self._center) / self._scale
        n, d = x.shape
        self._normals = rng.standard_normal((m.tables, m.bits, max(d, 1)))
        anchors = x[rng.integers(0, n, size=(m.tables, m.bits))] if d else np.zeros((m.tables, m.bits, 0))
        self._offsets = np.einsum("tbd,tbd->tb", self._normals[:, :, :d], anchors)
        codes = self._codes(x)
        self._buckets = []
        for t in range(m.tables):
            table = {}
            for i, c in enumerate(codes[:, t].tolist()):
                table.setdefault(c, []).append(i)
            self._buckets.append({c: np.array(v) for c, v in table.items()})

    def _codes(self, x):
        d = x.shape[1]
        proj = np.einsum("nd,tbd->ntb", x, self._normals[:, :, :d]) - self._offsets
        return ((proj > 0).astype(np.int64) * (1 << np.arange(self.method.bits))).sum(axis=2)

    def _candidates(self, q, k):
        x = ((q - self._center) / self._scale)[None, :]
        codes = self._codes(x)[0].tolist()
        bits = self.method.bits
        flips = [0] + [1 << b for b in range(bits)]
        cand = [self._buckets[t][c ^ f] for t, c in enumerate(codes) for f in flips
                if (c ^ f) in self._buckets[t]]
        found = np.unique(np.concatenate(cand)) if cand else np.zeros(0, dtype=np.int64)
        radius = 2
        while len(found) < k and radius <= bits:
            # widen the probe until enough candidates turn up
            cand = [found] + [members for t, c in enumerate(codes)
                              for key, members in self._buckets[t].items()
                              if bin(key ^ c).count("1") == radius]
            found = np.unique(np.concatenate(cand))
            radius += 1
        return found

    def query(self, q, k: int) -> QueryResult:
        q = np.asarray(q, dtype=float).ravel()
        if q.shape[0] != self.dim:
            raise ValueError(f"query has {q.shape[0]} dims, index has {self.dim}")
        if k < 1:
            raise ValueError("k must be >= 1")
        if isinstance(self.method, Lsh):
            rows = self._candidates(q, k)
        else:
            rows = np.arange(len(self.ids))
        diff = self.points[rows] - q
        dist = np.sqrt(np.einsum("nd,nd->n", diff, diff))
        # rows are sorted by id, so lexsort on (row, dist) breaks ties by smaller id
        order = np.lexsort((rows, dist))[:k]
        truncated = len(order) < k
        if truncated:
            warnings.warn(f"only {len(order)} candidates for top-{k}", TruncatedResult, stacklevel=2)
        return QueryResult(self.ids[rows[order]], dist[order], truncated)

    def query_topk(self, q, k: int) -> list[int]:
        return self.query(q, k).ids.tolist()


def build(e, method=None, restriction=None) -> NnIndex:
    """Index over the rows of embedding ``e``, optionally limited to ``restriction`` vertices."""
    if len(e.vertices) == 0:
        raise ValueError("embedding is empty")
    if restriction is None:
        return NnIndex(e.coords, e.vertices, method)
    restriction = np.unique(np.asarray(restriction, dtype=np.int64))
    if len(restriction) == 0:
        raise ValueError("empty restriction")
    rows = e.row_index()[restriction]
    if np.any(rows < 0):
        raise ValueError("restriction holds vertices that are not embedded")
    return NnIndex(e.coords[rows], restriction, method)


def query_topk(idx: NnIndex, q, k: int) -> list[int]:
    return idx.query_topk(q, k)
