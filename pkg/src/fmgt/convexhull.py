"""Graph convex hulls: the iterative FastMap algorithm (FMGCH) and an exact baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .embed import EmbedConfig, ShortestPath, embed
from .graph import (Graph, GraphError, _as_rng, _check_vertex, pairs_on_all_shortest_paths,
                    shortest_path_dictionary, vertices_on_all_shortest_paths)

FACE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GeometricHull:
    """Convex hull of a point set, kept in the coordinates of its affine span.

    A point ``x`` is inside iff ``y = basis.T @ (x - origin)`` satisfies
    ``normals @ y <= offsets`` and ``x`` lies on the span.
    """

    corners: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    origin: np.ndarray
    basis: np.ndarray
    dim: int
    tol: float

    @property
    def faces(self):
        return list(zip(self.normals, self.offsets))


def geometric_convex_hull(points, tol: float = FACE_TOL) -> GeometricHull:
    """Corners and bounding half-spaces; rank-deficient inputs are hulled inside their span."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n, d = pts.shape
    if n == 0:
        raise ValueError("no points")
    origin = pts.mean(axis=0)
    centered = pts - origin
    scale = float(np.abs(centered).max()) if n else 0.0
    atol = tol * max(1.0, scale, float(np.abs(origin).max()) if d else 0.0)
    if n == 1 or scale == 0.0 or d == 0:
        return GeometricHull(np.array([0]), np.zeros((0, 0)), np.zeros(0), origin, np.zeros((d, 0)), d, atol)
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(sv > 1e-9 * sv[0]))
    basis = vt[:rank].T
    y = centered @ basis
    if rank == 1:
        lo = int(np.lexsort((np.arange(n), y[:, 0]))[0])
        hi = int(np.lexsort((np.arange(n), -y[:, 0]))[0])
        corners = np.array(sorted({lo, hi}))
        normals = np.array([[1.0], [-1.0]])
        offsets = np.array([y[hi, 0], -y[lo, 0]])
        return GeometricHull(corners, normals, offsets, origin, basis, d, atol)
    try:
        hull = ConvexHull(y)
    except QhullError:
        hull = ConvexHull(y, qhull_options="QJ")
    eq = hull.equations
    normals = eq[:, :-1]
    norms = np.linalg.norm(normals, axis=1, keepdims=True)
    normals = normals / norms
    offsets = -eq[:, -1] / norms[:, 0]
    return GeometricHull(np.sort(hull.vertices), normals, offsets, origin, basis, d, atol)


def points_within_hull(h: GeometricHull, points) -> np.ndarray:
    """Boolean mask of the points inside or on the hull."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[1] != h.dim:
        raise ValueError("dimension mismatch")
    c = pts - h.origin
    y = c @ h.basis
    off_span = np.linalg.norm(c - y @ h.basis.T, axis=1) if h.dim else np.zeros(len(pts))
    inside = off_span <= h.tol
    if len(h.normals):
        inside &= np.all(y @ h.normals.T <= h.offsets + h.tol, axis=1)
    return inside


@dataclass(frozen=True, eq=False)
class HullResult:
    vertices: frozenset
    iterations: int
    method: str

    def sorted(self) -> list[int]:
        return sorted(self.vertices)


def _check_set(g: Graph, S) -> list[int]:
    S = sorted({_check_vertex(g, s) for s in S})
    if not S:
        raise GraphError("need a non-empty vertex set")
    return S


def _interval(spd, t) -> set:
    return vertices_on_all_shortest_paths(spd, t) if spd.reachable(t) else set()


def exact_graph_convex_hull(g: Graph, S, rng=None) -> HullResult:
    """Closure of ``S`` under all shortest paths, expanding one root at a time.

    Pairs already known to share a shortest path with a processed pair are
    skipped, since their paths add nothing new.
    """
    S = _check_set(g, S)
    rng = _as_rng(rng)
    hull = set(S)
    unexpanded = set(S)
    expanded = set()
    pairs = set()
    rounds = 0
    while unexpanded:
        rounds += 1
        pool = sorted(unexpanded)
        s = pool[int(rng.integers(len(pool)))]
        spd = shortest_path_dictionary(g, s)
        new = set()
        for t in sorted(hull):
            if t == s or ((s, t) if s < t else (t, s)) in pairs or not spd.reachable(t):
                continue
            vst = vertices_on_all_shortest_paths(spd, t)
            pairs |= pairs_on_all_shortest_paths(spd, t)
            for v in vst:
                if v not in expanded and v not in unexpanded:
                    unexpanded.add(v)
                    new.add(v)
        hull |= new
        expanded.add(s)
        unexpanded.discard(s)
    return HullResult(frozenset(hull), rounds, "exact")


def naive_graph_convex_hull(g: Graph, S) -> HullResult:
    """Fixed point of adding every vertex on every shortest path between current members."""
    from .graph import all_pairs_distances

    D = all_pairs_distances(g)
    cur = set(_check_set(g, S))
    rounds = 0
    while True:
        rounds += 1
        members = np.array(sorted(cur))
        # v lies on a shortest a-b path iff d(a,v) + d(v,b) == d(a,b)
        Dm = D[members]
        tot = Dm[:, None, :] + Dm[None, :, :]
        ab = D[np.ix_(members, members)][:, :, None]
        on = np.isfinite(ab) & (np.abs(tot - ab) <= 1e-9 * np.maximum(1.0, ab))
        nxt = cur | set(np.flatnonzero(on.any(axis=(0, 1))).tolist())
        if nxt == cur:
            return HullResult(frozenset(cur), rounds, "naive")
        cur = nxt


def fmgch(g: Graph, S, kappa: int = 4, epsilon: float = 1e-4, max_iters: int = 10, rng=None,
          embedding=None) -> HullResult:
    """Iterative FastMap hull: grow the set along shortest paths between hull corners.

    Pass ``embedding`` to reuse a precomputed embedding of ``g``.
    """
    S = _check_set(g, S)
    e = embedding if embedding is not None else embed(
        g, EmbedConfig(kappa=kappa, epsilon=epsilon, mode=ShortestPath()), rng)
    if len(e.vertices) != g.n:
        raise GraphError("embedding must cover every vertex")
    rows = e.row_index()
    P = e.coords

    def hull_of(members):
        ids = np.array(sorted(members))
        h = geometric_convex_hull(P[rows[ids]])
        return h, frozenset(ids[h.corners].tolist())

    cur = set(S)
    h, corners = hull_of(cur)
    prev = None
    dicts = {}
    cached = set()
    iters = 0
    while corners != prev and iters < max_iters:
        iters += 1
        prev = corners
        todo = [(i, j) for i in sorted(prev) for j in sorted(prev) if i < j and (i, j) not in cached]
        before = len(cur)
        for i, j in todo:
            cached.add((i, j))
            spd = dicts.get(i)
            if spd is None:
                spd = dicts[i] = shortest_path_dictionary(g, i)
            cur |= _interval(spd, j)
        if len(cur) == before:
            break
        h, corners = hull_of(cur)
    inside = set(e.vertices[points_within_hull(h, P)].tolist())
    return HullResult(frozenset(inside | cur), iters, "fmgch")


def hull_scores(approx: HullResult, truth: HullResult) -> tuple[float, float, float]:
    A, T = set(approx.vertices), set(truth.vertices)
    inter = len(A & T)
    if not A:
        precision = 1.0 if not T else 0.0
    else:
        precision = inter / len(A)
    recall = inter / len(T) if T else 1.0
    union = len(A | T)
    jaccard = inter / union if union else 1.0
    return precision, recall, jaccard
