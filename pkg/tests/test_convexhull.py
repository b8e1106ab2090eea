import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from fmgt import generators
from fmgt.convexhull import (HullResult, exact_graph_convex_hull, fmgch, geometric_convex_hull,
                             hull_scores, naive_graph_convex_hull, points_within_hull)
from fmgt.embed import EmbedConfig, embed
from fmgt.graph import Graph, GraphError, shortest_path_dictionary, vertices_on_all_shortest_paths

from conftest import cycle_graph, path_graph, random_graph


def extreme_points_oracle(pts):
    """A point is a corner iff it is not a convex combination of the others (feasibility LP)."""
    n, d = pts.shape
    out = []
    for i in range(n):
        others = np.delete(pts, i, axis=0)
        A = np.vstack([others.T, np.ones(len(others))])
        b = np.append(pts[i], 1.0)
        res = linprog(np.zeros(len(others)), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
        if res.status != 0:
            out.append(i)
    return out


def test_square_with_center():
    pts = np.array([[0, 0], [1, 0], [0, 1], [1, 1], [0.5, 0.5]], float)
    h = geometric_convex_hull(pts)
    assert h.corners.tolist() == [0, 1, 2, 3]
    assert points_within_hull(h, pts).all()
    assert not points_within_hull(h, np.array([[5.0, 5.0]]))[0]


def test_collinear_extremes():
    pts = np.array([[0, 0], [2, 2], [1, 1], [3, 3]], float)
    h = geometric_convex_hull(pts)
    assert h.corners.tolist() == [0, 3]
    inside = points_within_hull(h, np.array([[1.5, 1.5], [4, 4], [1, 1.2]]))
    assert inside.tolist() == [True, False, False]


def test_single_point_and_duplicates():
    h = geometric_convex_hull(np.array([[1.0, 2.0]]))
    assert h.corners.tolist() == [0]
    h = geometric_convex_hull(np.ones((4, 3)))
    assert len(h.corners) == 1
    assert points_within_hull(h, np.array([[1.0, 1, 1], [1, 1, 2]])).tolist() == [True, False]


@pytest.mark.parametrize("seed", range(4))
def test_corners_match_lp_oracle_3d(seed):
    pts = np.random.default_rng(seed).normal(size=(30, 3))
    assert geometric_convex_hull(pts).corners.tolist() == extreme_points_oracle(pts)


def test_corners_in_4d_and_planar_3d():
    pts = np.random.default_rng(9).normal(size=(25, 4))
    assert geometric_convex_hull(pts).corners.tolist() == extreme_points_oracle(pts)
    flat = np.random.default_rng(2).normal(size=(15, 2)) @ np.array([[1.0, 0, 2], [0, 1, -1]])
    assert geometric_convex_hull(flat).corners.tolist() == extreme_points_oracle(flat)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31))
def test_within_simplex_matches_barycentric(d, seed):
    rng = np.random.default_rng(seed)
    simplex = rng.normal(size=(d + 1, d))
    if abs(np.linalg.det(simplex[1:] - simplex[0])) < 1e-3:
        return
    h = geometric_convex_hull(simplex)
    q = rng.normal(size=(50, d)) * 1.5
    T = np.vstack([simplex.T, np.ones(d + 1)])
    bary = np.linalg.solve(T, np.vstack([q.T, np.ones(len(q))]))
    want = np.all(bary >= -1e-9, axis=0)
    margin = np.min(np.abs(bary), axis=0) > 1e-7
    got = points_within_hull(h, q)
    assert np.array_equal(got[margin], want[margin])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.integers(1, 4), st.integers(0, 2**31))
def test_all_inputs_inside_own_hull(n, d, seed):
    pts = np.random.default_rng(seed).normal(size=(n, d))
    h = geometric_convex_hull(pts)
    assert points_within_hull(h, pts).all()
    assert set(h.corners.tolist()) <= set(range(n))


# graph hulls

def test_exact_examples(backend):
    assert exact_graph_convex_hull(path_graph(6), [0, 5], 0).vertices == frozenset(range(6))
    assert exact_graph_convex_hull(path_graph(6), [3], 0).vertices == frozenset({3})
    assert exact_graph_convex_hull(cycle_graph(4), [0, 2], 0).vertices == frozenset(range(4))
    with pytest.raises(GraphError):
        exact_graph_convex_hull(path_graph(3), [])


@pytest.mark.parametrize("seed", range(15))
def test_exact_matches_naive(backend, seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, 12, 0.25, connected=True)
    S = rng.choice(12, int(rng.integers(1, 5)), replace=False).tolist()
    ex = exact_graph_convex_hull(g, S, seed)
    assert ex.vertices == naive_graph_convex_hull(g, S).vertices
    # closure: no pair of members adds anything
    for s in ex.vertices:
        spd = shortest_path_dictionary(g, s)
        for t in ex.vertices:
            assert vertices_on_all_shortest_paths(spd, t) <= ex.vertices


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 14), st.integers(0, 2**31))
def test_hull_monotone(n, seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, n, 0.3, connected=True)
    S = rng.choice(n, max(1, n // 4), replace=False).tolist()
    extra = S + [int(rng.integers(n))]
    assert exact_graph_convex_hull(g, S, 0).vertices <= exact_graph_convex_hull(g, extra, 0).vertices


def test_fmgch_examples():
    g = random_graph(np.random.default_rng(0), 15, 0.3, connected=True)
    assert fmgch(g, range(15), rng=0).vertices == frozenset(range(15))
    assert fmgch(g, [4], rng=0).vertices == frozenset({4})
    c = cycle_graph(4)
    assert fmgch(c, [0, 2], kappa=2, rng=0).vertices == exact_graph_convex_hull(c, [0, 2]).vertices


@pytest.mark.parametrize("seed", range(6))
def test_fmgch_contains_s_and_high_precision(seed):
    rng = np.random.default_rng(seed)
    g = generators.gen_waxman(120, 100 / 120, 0.1, rng=seed).with_unit_weights()
    S = rng.choice(g.n, 6, replace=False).tolist()
    approx = fmgch(g, S, rng=seed)
    truth = exact_graph_convex_hull(g, S, seed)
    assert set(S) <= approx.vertices
    p, r, j = hull_scores(approx, truth)
    assert p >= 0.9
    assert approx.iterations <= 10


def test_fmgch_reuses_embedding():
    g = random_graph(np.random.default_rng(2), 20, 0.2, connected=True)
    e = embed(g, EmbedConfig(kappa=4), 5)
    assert fmgch(g, [0, 7, 12], embedding=e).vertices == fmgch(g, [0, 7, 12], embedding=e).vertices
    with pytest.raises(GraphError):
        fmgch(g, [0], embedding=embed(g, EmbedConfig(kappa=2), 0, mask=[0, 1, 2]))


def test_scores_examples():
    t = HullResult(frozenset({1, 2, 3, 4}), 1, "exact")
    assert hull_scores(t, t) == (1, 1, 1)
    assert hull_scores(HullResult(frozenset({1, 2}), 1, "fmgch"), t) == (1, 0.5, 0.5)
    empty = HullResult(frozenset(), 0, "fmgch")
    assert hull_scores(empty, HullResult(frozenset(), 0, "exact"))[0] == 1
    assert hull_scores(empty, t)[0] == 0
