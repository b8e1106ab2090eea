"""Facility location on graphs: meeting points and vertex K-median variants.

FastMap solvers work in a square-root shortest-path embedding, where squared
Euclidean distances stand in for graph distances, and report costs measured
exactly on the graph.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import clustering
from .embed import SqrtShortestPath
from .graph import Graph, GraphError, _as_rng, _check_vertex, distances_from

PROBLEMS = ("mam", "vkm", "wvkm", "cvkm")


@dataclass(frozen=True, eq=False)
class FlpSolution:
    problem: str
    facilities: tuple
    cost: float
    method: str
    assignment: np.ndarray | None = None
    tau: int | None = None
    starts: tuple | None = None
    center_gaps: tuple = field(default=(), repr=False)

    def to_json(self, seed=None) -> dict:
        out = {"problem": self.problem, "K": len(self.facilities), "facilities": list(self.facilities),
               "cost": self.cost, "method": self.method, "seed": seed}
        if self.tau is not None:
            out["tau"] = self.tau
        if self.assignment is not None:
            out["assignment"] = self.assignment.tolist()
        if self.starts is not None:
            out["starts"] = list(self.starts)
        return out


def default_tau(n: int, K: int) -> int:
    return math.ceil(2 * n / K)


def suboptimality(cost: float, opt: float) -> float:
    if opt == 0:
        return 0.0 if cost == 0 else math.inf
    return (cost - opt) / opt


def _require_sqrt(e):
    if not isinstance(e.mode, SqrtShortestPath):
        raise ValueError("facility solvers need a SqrtShortestPath embedding")


def _dist_matrix(g: Graph, sources) -> np.ndarray:
    d = distances_from(g, sources)
    if not np.all(np.isfinite(d)):
        raise GraphError("graph is disconnected; facility costs are undefined")
    return d


def _weights(g: Graph, weights):
    if weights is None:
        weights = g.vertex_weights
    if weights is None:
        raise GraphError("vertex weights are required")
    w = np.asarray(weights, dtype=float)
    if w.shape != (g.n,) or np.any(w < 0):
        raise GraphError("need one non-negative weight per vertex")
    return w


def evaluate_flp(g: Graph, sol: FlpSolution, problem: str | None = None, weights=None) -> float:
    """Exact objective from Dijkstra trees rooted at the facilities."""
    problem = problem or sol.problem
    fac = np.asarray(sol.facilities, dtype=np.int64)
    if len(fac) == 0 or len(set(fac.tolist())) != len(fac):
        raise GraphError("facilities must be distinct and non-empty")
    for f in fac.tolist():
        _check_vertex(g, f)
    d = _dist_matrix(g, fac)
    if problem == "mam":
        if sol.starts is None:
            raise GraphError("meeting-point solution carries no starts")
        return float(d[0, list(sol.starts)].sum())
    if problem == "vkm":
        return float(d.min(axis=0).sum())
    if problem == "wvkm":
        return float((_weights(g, weights) * d.min(axis=0)).sum())
    if problem == "cvkm":
        a = sol.assignment
        if a is None or len(a) != g.n:
            raise GraphError("capacitated solution needs a full assignment")
        if np.any(a < 0) or np.any(a >= len(fac)):
            raise GraphError("assignment refers to unknown facilities")
        load = np.bincount(a, minlength=len(fac))
        if sol.tau is not None and load.max() > sol.tau:
            raise GraphError(f"assignment exceeds capacity {sol.tau} (load {int(load.max())})")
        return float(d[a, np.arange(g.n)].sum())
    raise ValueError(f"unknown problem {problem!r}")


def _starts(e, starts):
    starts = [int(s) for s in starts]
    if not starts:
        raise GraphError("need at least one start vertex")
    rows = e.row_index()
    for s in starts:
        if not (0 <= s < e.n_graph) or rows[s] < 0:
            raise GraphError(f"start vertex {s} is not embedded")
    return starts, rows[starts]


def solve_mam_fastmap(g: Graph, starts, e, idx) -> FlpSolution:
    """Vertex nearest to the centroid of the agents' start points."""
    _require_sqrt(e)
    starts, rows = _starts(e, starts)
    centroid = e.coords[rows].mean(axis=0)
    res = idx.query(centroid, 1)
    v = int(res.ids[0])
    cost = float(_dist_matrix(g, [v])[0, starts].sum())
    return FlpSolution("mam", (v,), cost, "fastmap", starts=tuple(starts), center_gaps=(float(res.dists[0]),))


def solve_mam_exact(g: Graph, starts) -> FlpSolution:
    starts = [_check_vertex(g, s) for s in starts]
    if not starts:
        raise GraphError("need at least one start vertex")
    total = _dist_matrix(g, starts).sum(axis=0)
    v = int(np.argmin(total))
    return FlpSolution("mam", (v,), float(total[v]), "exact", starts=tuple(starts))


def centers_to_vertices(centers, idx) -> tuple[list[int], list[float]]:
    """Nearest vertex per center; a center whose vertex is taken moves to its next-nearest free one."""
    used, out, gaps = set(), [], []
    for c in centers:
        k = min(len(centers), len(idx))
        while True:
            res = idx.query(c, k)
            pick = next(((int(v), float(d)) for v, d in zip(res.ids, res.dists) if int(v) not in used), None)
            if pick is not None or k >= len(idx):
                break
            k = min(2 * k, len(idx))
        if pick is None:
            raise GraphError("not enough indexed vertices for distinct facilities")
        used.add(pick[0])
        out.append(pick[0])
        gaps.append(pick[1])
    return out, gaps


def _check_k(g, e, K):
    if K < 1 or K > g.n:
        raise GraphError(f"need 1 <= K <= n, got K={K}, n={g.n}")
    _require_sqrt(e)


def _centers_solution(g, problem, km, e, idx, cost_fn, **extra):
    fac, gaps = centers_to_vertices(km.centers, idx)
    sol = FlpSolution(problem, tuple(fac), 0.0, "fastmap", center_gaps=tuple(gaps), **extra)
    return replace(sol, cost=cost_fn(sol))


def solve_vkm(g: Graph, K: int, e, idx, rng=None) -> FlpSolution:
    _check_k(g, e, K)
    km = clustering.kmeans(e.coords, K, rng=rng)
    return _centers_solution(g, "vkm", km, e, idx, lambda s: evaluate_flp(g, s, "vkm"))


def solve_wvkm(g: Graph, K: int, e, idx, weights=None, rng=None) -> FlpSolution:
    _check_k(g, e, K)
    w = _weights(g, weights)
    km = clustering.kmeans(e.coords, K, weights=w[e.vertices], rng=rng)
    return _centers_solution(g, "wvkm", km, e, idx, lambda s: evaluate_flp(g, s, "wvkm", w))


def solve_cvkm(g: Graph, K: int, e, idx, tau: int | None = None, rng=None) -> FlpSolution:
    """Capacitated k-means in the embedding; each vertex keeps the facility of its cluster."""
    _check_k(g, e, K)
    tau = default_tau(g.n, K) if tau is None else int(tau)
    if K * tau < g.n:
        raise GraphError(f"infeasible capacity: K={K} x tau={tau} < n={g.n}")
    if len(e.vertices) != g.n:
        raise GraphError("capacitated solver needs every vertex embedded")
    km = clustering.constrained_kmeans(e.coords, K, tau, rng=rng)
    assignment = np.empty(g.n, dtype=np.int64)
    assignment[e.vertices] = km.labels
    return _centers_solution(g, "cvkm", km, e, idx, lambda s: evaluate_flp(g, s, "cvkm"),
                             assignment=assignment, tau=tau)


def capacitated_cost(d: np.ndarray, tau: int) -> tuple[float, np.ndarray]:
    """Optimal capacitated assignment cost for facility-to-vertex distances ``d`` (K x n)."""
    K, n = d.shape
    slots = min(tau, n)
    cost = np.repeat(d.T, slots, axis=1)
    rows, cols = linear_sum_assignment(cost)
    a = np.empty(n, dtype=np.int64)
    a[rows] = cols // slots
    return float(cost[rows, cols].sum()), a


def solve_exhaustive(g: Graph, problem: str, K: int, tau: int | None = None, weights=None) -> FlpSolution:
    """Brute force over all K-subsets of vertices (small graphs only)."""
    if problem not in ("vkm", "wvkm", "cvkm"):
        raise ValueError(f"unknown problem {problem!r}")
    if math.comb(g.n, K) > 200_000:
        raise GraphError("instance too large for exhaustive search")
    D = _dist_matrix(g, np.arange(g.n))
    w = _weights(g, weights) if problem == "wvkm" else np.ones(g.n)
    if problem == "cvkm":
        tau = default_tau(g.n, K) if tau is None else tau
    best = None
    for fac in itertools.combinations(range(g.n), K):
        d = D[list(fac)]
        if problem == "cvkm":
            c, a = capacitated_cost(d, tau)
        else:
            c, a = float((w * d.min(axis=0)).sum()), None
        if best is None or c < best[0]:
            best = (c, fac, a)
    c, fac, a = best
    return FlpSolution(problem, tuple(fac), c, "exact", assignment=a, tau=tau if problem == "cvkm" else None)


def random_starts(g: Graph, k: int, rng=None) -> list[int]:
    rng = _as_rng(rng)
    return sorted(rng.choice(g.n, size=k, replace=False).tolist())
