"""Top-K centrality and projected centrality through FastMap, with exact baselines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nn_index
from .clustering import hierarchical_gmm_dominant
from .embed import (EmbedConfig, Paspd, ShortestPath, SqrtShortestPath,
                    build_paspd_ensemble, embed, ss_paspd)
from .graph import Graph, GraphError, _as_rng, all_pairs_distances, distances_from

MEASURES = ("closeness", "harmonic", "cfc", "eigenvector")
METHODS = ("fastmap", "exact", "apd", "fmav", "fmpv")
CFC_MAX_N = 2000


@dataclass(frozen=True, eq=False)
class RankResult:
    topk: list
    values: list | None
    measure: str
    method: str

    def with_values(self, truth) -> RankResult:
        truth = np.asarray(truth)
        return RankResult(self.topk, [float(truth[v]) for v in self.topk], self.measure, self.method)

    def to_json(self) -> dict:
        return {"measure": self.measure, "method": self.method, "K": len(self.topk),
                "topk": list(self.topk), "values": self.values}


def embedding_mode(measure: str, L: int = 4, F: int = 10):
    if measure == "closeness":
        return SqrtShortestPath()
    if measure in ("harmonic", "eigenvector"):
        return ShortestPath()
    if measure == "cfc":
        return Paspd(L=L, F=F, use_complement=False, sqrt=True)
    raise ValueError(f"unknown measure {measure!r}")


def _require_connected(g: Graph):
    if g.n == 0:
        raise GraphError("empty graph")
    if not g.is_connected():
        raise GraphError("centrality needs a connected graph")


# exact baselines

def closeness_from_distances(D: np.ndarray) -> np.ndarray:
    n = D.shape[0]
    if n == 1:
        return np.zeros(1)
    total = D.sum(axis=1)
    with np.errstate(divide="ignore"):
        return np.where(total > 0, (n - 1) / total, np.inf)


def harmonic_from_distances(D: np.ndarray) -> np.ndarray:
    D = D.copy()
    np.fill_diagonal(D, np.inf)
    with np.errstate(divide="ignore"):
        inv = np.where(D > 0, 1.0 / D, np.inf)
    return inv.sum(axis=1)


def conductance_matrix(g: Graph) -> np.ndarray:
    if np.any(g.w <= 0):
        raise GraphError("zero-weight edges have unbounded conductance")
    C = np.zeros((g.n, g.n))
    C[g.u, g.v] = C[g.v, g.u] = 1.0 / g.w
    return C


def effective_resistance(g: Graph) -> np.ndarray:
    if g.n > CFC_MAX_N:
        raise GraphError(f"exact current-flow baseline refused for n > {CFC_MAX_N}")
    C = conductance_matrix(g)
    Lap = np.diag(C.sum(axis=1)) - C
    Lp = np.linalg.pinv(Lap, hermitian=True)
    d = np.diag(Lp)
    return np.maximum(d[:, None] + d[None, :] - 2 * Lp, 0.0)


def cfc_values(g: Graph) -> np.ndarray:
    R = effective_resistance(g)
    if g.n == 1:
        return np.zeros(1)
    return (g.n - 1) / R.sum(axis=1)


def transition_matrix(g: Graph) -> np.ndarray:
    """Row-stochastic walk matrix with transition weight ``1/w`` per edge."""
    C = conductance_matrix(g)
    s = C.sum(axis=1, keepdims=True)
    if np.any(s == 0):
        raise GraphError("isolated vertex has no transitions")
    return C / s


def eigenvector_values(g: Graph, tol: float = 1e-10, max_iter: int = 1_000_000) -> np.ndarray:
    """Fixed point ``e = N^T e`` with ``sum(e) = 1`` by power iteration.

    The lazy walk ``(I + N)/2`` shares the fixed point and also converges on
    bipartite graphs.
    """
    if g.n == 1:
        return np.ones(1)
    N = transition_matrix(g)
    e = np.full(g.n, 1.0 / g.n)
    for _ in range(max_iter):
        nxt = 0.5 * (e + N.T @ e)
        nxt /= nxt.sum()
        if np.abs(nxt - e).max() < tol:
            return nxt
        e = nxt
    return e


def exact_centrality(g: Graph, measure: str) -> np.ndarray:
    _require_connected(g)
    if measure == "closeness":
        return closeness_from_distances(all_pairs_distances(g))
    if measure == "harmonic":
        return harmonic_from_distances(all_pairs_distances(g))
    if measure == "cfc":
        return cfc_values(g)
    if measure == "eigenvector":
        return eigenvector_values(g)
    raise ValueError(f"unknown measure {measure!r}")


def topk_from_values(values, K: int, candidates=None) -> list[int]:
    """Highest values first, ties to the smaller id."""
    values = np.asarray(values, dtype=float)
    cand = np.arange(len(values)) if candidates is None else np.asarray(candidates, dtype=np.int64)
    order = np.lexsort((cand, -values[cand]))
    return cand[order[:K]].tolist()


def ndcg(candidate, truth_values, K: int) -> float:
    """Discounted gains of the candidate top-K over those of the ideal top-K."""
    if K < 1:
        raise ValueError("K must be >= 1")
    truth = np.asarray(truth_values, dtype=float)
    topk = candidate.topk if isinstance(candidate, RankResult) else list(candidate)
    topk = topk[:K]
    disc = 1.0 / np.log2(np.arange(2, K + 2))
    dcg = float(np.sum(truth[topk] * disc[:len(topk)]))
    ideal = np.sort(truth)[::-1][:K]
    idcg = float(np.sum(ideal * disc[:len(ideal)]))
    if idcg == 0:
        return 1.0
    return dcg / idcg


# analytics in the embedding

def harmonic_objective(q, pts, eps: float = 1e-9) -> float:
    return float(np.sum(1.0 / (np.linalg.norm(pts - q, axis=1) + eps)))


def harmonic_gradient(q, pts, eps: float = 1e-9) -> np.ndarray:
    diff = pts - q
    r = np.linalg.norm(diff, axis=1) + eps
    return (diff / r[:, None] ** 3).sum(axis=0)


def harmonic_ascent(pts, q0, *, steps: int = 200, eps: float = 1e-9):
    """Normalized-gradient ascent with halving backtracking; returns the path of accepted points."""
    q = np.asarray(q0, dtype=float).copy()
    f = harmonic_objective(q, pts, eps)
    spread = float(np.sqrt(((pts - pts.mean(0)) ** 2).sum(1).mean())) or 1.0
    step = 0.1 * spread
    path = [(q.copy(), f)]
    for _ in range(steps):
        g = harmonic_gradient(q, pts, eps)
        gn = np.linalg.norm(g)
        if gn == 0:
            break
        direction = g / gn
        t = step
        while t > 1e-12 * spread:
            cand = q + t * direction
            fc = harmonic_objective(cand, pts, eps)
            if fc > f:
                break
            t *= 0.5
        else:
            break
        q, f = cand, fc
        step = min(2 * t, spread)
        path.append((q.copy(), f))
    return path


def harmonic_target(pts, *, restarts: int = 5, steps: int = 200):
    """Best ascent end point, scored without the singular term of any coincident point."""
    centroid = pts.mean(axis=0)
    near = np.argsort(np.linalg.norm(pts - centroid, axis=1), kind="stable")[:restarts]
    starts = [centroid] + [pts[i] for i in near]
    scale = float(np.abs(pts - centroid).max()) or 1.0
    best, best_score = centroid, -np.inf
    for s in starts:
        q = harmonic_ascent(pts, s, steps=steps)[-1][0]
        r = np.linalg.norm(pts - q, axis=1)
        score = np.sum(1.0 / r[r > 1e-9 * scale])
        if score > best_score:
            best, best_score = q, score
    return best


def _analytic_point(measure: str, pts: np.ndarray, rng):
    if measure in ("closeness", "cfc"):
        return pts.mean(axis=0)
    if measure == "harmonic":
        return harmonic_target(pts)
    if measure == "eigenvector":
        return hierarchical_gmm_dominant(pts, rng)
    raise ValueError(f"unknown measure {measure!r}")


def topk_in_embedding(measure: str, e, idx, K: int, rng=None, *, restriction=None, method="fastmap") -> RankResult:
    """Analytic target point in the embedding, then its ``K`` nearest indexed vertices."""
    if restriction is None:
        pts = e.coords
    else:
        pts = e.coords[e.row_index()[np.asarray(restriction, dtype=np.int64)]]
    if len(pts) == 0:
        raise GraphError("nothing to rank")
    K = min(K, len(idx))
    if pts.shape[1] == 0:
        ids = sorted(idx.ids.tolist())[:K]
        return RankResult(ids, None, measure, method)
    q = _analytic_point(measure, pts, _as_rng(rng))
    return RankResult(idx.query(q, K).ids.tolist(), None, measure, method)


def topk_closeness_fm(g, K, e, idx, rng=None) -> RankResult:
    return topk_in_embedding("closeness", e, idx, K, rng)


def topk_harmonic_fm(g, K, e, idx, rng=None) -> RankResult:
    return topk_in_embedding("harmonic", e, idx, K, rng)


def topk_cfc_fm(g, K, e, idx, rng=None) -> RankResult:
    return topk_in_embedding("cfc", e, idx, K, rng)


def topk_eigen_fm(g, K, e, idx, rng=None) -> RankResult:
    return topk_in_embedding("eigenvector", e, idx, K, rng)


def topk_fastmap(g: Graph, measure: str, K: int, rng=None, *, kappa: int = 4, epsilon: float = 1e-4,
                 L: int = 4, F: int = 10, lsh: bool = True) -> RankResult:
    """Full pipeline: embed under the measure's distance, index, rank."""
    _require_connected(g)
    rng = _as_rng(rng)
    e = embed(g, EmbedConfig(kappa=kappa, epsilon=epsilon, mode=embedding_mode(measure, L, F)), rng)
    idx = nn_index.build(e, nn_index.Lsh(seed=int(rng.integers(2**31))) if lsh else nn_index.Exact())
    return topk_in_embedding(measure, e, idx, K, rng)


# projected centrality

def projected_graph(g: Graph, mask, measure: str, rng=None, *, L: int = 4, F: int = 10):
    """Complete graph on the pertinent vertices weighted by graph distance (PASPD for ``cfc``)."""
    mask = np.unique(np.asarray(mask, dtype=np.int64))
    if measure == "cfc":
        ens = build_paspd_ensemble(g, L, F, use_complement=False, rng=rng)
        D = np.vstack([ss_paspd(g, ens, s)[mask] for s in mask.tolist()])
    else:
        D = distances_from(g, mask)[:, mask]
    if not np.all(np.isfinite(D)):
        raise GraphError("pertinent vertices are not mutually reachable")
    iu, ju = np.triu_indices(len(mask), k=1)
    w = D[iu, ju]
    if np.any(w <= 0):
        raise GraphError("coincident pertinent vertices (zero distance)")
    return Graph(len(mask), iu, ju, w, _validated=True), mask


def projected_values(g: Graph, mask, measure: str, rng=None, **kw) -> np.ndarray:
    """Projected centrality of every pertinent vertex, indexed by original vertex id (nan elsewhere)."""
    gp, ids = projected_graph(g, mask, measure, rng, **kw)
    vals = np.full(g.n, np.nan)
    if gp.n == 1:
        vals[ids] = 1.0
        return vals
    vals[ids] = exact_centrality(gp, measure)
    return vals


def topk_projected(g: Graph, mask, measure: str, method: str, K: int, rng=None, *,
                   kappa: int = 4, epsilon: float = 1e-4, L: int = 4, F: int = 10, lsh: bool = True) -> RankResult:
    _require_connected(g)
    mask = np.unique(np.asarray(mask, dtype=np.int64))
    if len(mask) == 0:
        raise GraphError("empty pertinent set")
    if method == "apd":
        vals = projected_values(g, mask, measure, rng, L=L, F=F)
        top = topk_from_values(np.nan_to_num(vals, nan=-np.inf), K, mask)
        return RankResult(top, [float(vals[v]) for v in top], measure, "apd")
    if method not in ("fmav", "fmpv"):
        raise ValueError(f"unknown projected method {method!r}")
    rng = _as_rng(rng)
    cfg = EmbedConfig(kappa=kappa, epsilon=epsilon, mode=embedding_mode(measure, L, F))
    e = embed(g, cfg, rng, mask=mask if method == "fmpv" else None)
    kind = nn_index.Lsh(seed=int(rng.integers(2**31))) if lsh else nn_index.Exact()
    idx = nn_index.build(e, kind, restriction=mask)
    return topk_in_embedding(measure, e, idx, K, rng, restriction=mask, method=method)


def topk_exact(g: Graph, measure: str, K: int) -> RankResult:
    vals = exact_centrality(g, measure)
    top = topk_from_values(vals, K)
    return RankResult(top, [float(vals[v]) for v in top], measure, "exact")
