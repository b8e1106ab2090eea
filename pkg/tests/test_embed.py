import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fmgt import generators
from fmgt.embed import (EmbedConfig, Paspd, PaspdEnsemble, ShortestPath, SqrtShortestPath,
                        build_paspd_ensemble, coordinate, embed, euclidean_distance, residual_sq, ss_paspd)
from fmgt.graph import Graph, GraphError, all_pairs_distances

from conftest import floyd_warshall, path_graph, random_graph


def test_coordinate_examples():
    assert coordinate(0, 4, 4) == 0
    assert coordinate(4, 4, 0) == 2
    assert coordinate(4, 4, 4) == 1
    with pytest.raises(ValueError):
        coordinate(1, 0, 1)


def test_residual_examples():
    assert residual_sq(9, [1.0], [1.0]) == 9
    assert residual_sq(9, [3.0], [0.0]) == 0
    assert residual_sq(4, [3.0], [0.0]) == 0
    with pytest.raises(ValueError):
        residual_sq(4, [1.0, 2.0], [0.0])


def test_config_validation():
    with pytest.raises(ValueError):
        EmbedConfig(kappa=0)
    with pytest.raises(ValueError):
        EmbedConfig(epsilon=0)
    with pytest.raises(ValueError):
        EmbedConfig(q_max=0)
    with pytest.raises(ValueError):
        Paspd(L=0)


def test_path_example(backend):
    e = embed(path_graph(3), EmbedConfig(kappa=1), 0)
    assert set(e.pivots[0]) == {0, 2}
    c = e.coords[:, 0]
    if c[0] > c[2]:
        c = -c + c[0]
    np.testing.assert_allclose(c, [0, 1, 2], atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_kappa1_pivot_separation_is_graph_distance(backend, seed):
    g = random_graph(np.random.default_rng(seed), 15, 0.3, integer=False, connected=True)
    e = embed(g, EmbedConfig(kappa=1), seed)
    a, b = e.pivots[0]
    D = floyd_warshall(g)
    assert abs(e.point(a)[0] - e.point(b)[0]) == pytest.approx(D[a, b], rel=1e-12)


def test_k4_stops_early(backend):
    g = Graph.from_edges(4, list(itertools.combinations(range(4), 2)))
    e = embed(g, EmbedConfig(kappa=4, epsilon=1e-4), 0)
    assert 1 <= e.kappa_used < 4
    # unit K4 is a regular simplex: the embedding reproduces it exactly
    X = e.coords
    np.testing.assert_allclose(np.linalg.norm(X[:, None] - X[None], axis=2), 1 - np.eye(4), atol=1e-9)


def test_single_vertex_and_empty():
    e = embed(Graph(1, [], [], []), EmbedConfig(kappa=3), 0)
    assert e.kappa_used == 0 and e.coords.shape == (1, 0)
    with pytest.raises(GraphError):
        embed(Graph(0, [], [], []))


def _anchor_ok(g, e, mode):
    rows = e.row_index()
    for j, ((a, b), d_ab) in enumerate(zip(e.pivots, e.pivot_residuals)):
        pa, pb = e.coords[rows[a], j], e.coords[rows[b], j]
        assert abs(pa) <= 1e-9 * max(1.0, math.sqrt(d_ab))
        assert abs(pb - math.sqrt(d_ab)) <= 1e-9 * max(1.0, math.sqrt(d_ab))
        assert d_ab >= EmbedConfig().epsilon


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30), st.integers(1, 6), st.integers(0, 2**31),
       st.sampled_from(["sp", "sqrt", "paspd"]))
def test_pivot_anchor_property(n, kappa, seed, mode):
    g = random_graph(np.random.default_rng(seed), n, 0.25, integer=False, connected=True)
    m = {"sp": ShortestPath(), "sqrt": SqrtShortestPath(), "paspd": Paspd(L=2, F=4)}[mode]
    e = embed(g, EmbedConfig(kappa=kappa, mode=m), seed)
    assert e.coords.shape == (g.n, e.kappa_used) and e.kappa_used <= kappa
    assert e.kappa_used >= 1
    _anchor_ok(g, e, m)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 20), st.integers(0, 2**31))
def test_residual_monotone_across_dimensions(n, seed):
    g = random_graph(np.random.default_rng(seed), n, 0.3, integer=False, connected=True)
    e = embed(g, EmbedConfig(kappa=5), seed)
    D2 = floyd_warshall(g) ** 2
    i, j = seed % n, (seed // 3) % n
    vals = [float(residual_sq(D2[i, j], e.coords[i, :r], e.coords[j, :r])) for r in range(e.kappa_used + 1)]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_determinism():
    g = generators.gen_waxman(120, rng=3)
    for mode in (ShortestPath(), Paspd()):
        a = embed(g, EmbedConfig(kappa=4, mode=mode), 9)
        b = embed(g, EmbedConfig(kappa=4, mode=mode), 9)
        assert a.coords.tobytes() == b.coords.tobytes() and a.pivots == b.pivots


def test_mask_embeds_only_pertinent(backend):
    g = random_graph(np.random.default_rng(1), 20, 0.25, integer=False, connected=True)
    mask = [0, 3, 7, 8, 15]
    e = embed(g, EmbedConfig(kappa=3), 2, mask=mask)
    assert e.vertices.tolist() == mask
    assert all(a in mask and b in mask for a, b in e.pivots)
    _anchor_ok(g, e, ShortestPath())
    # with kappa=1 pivot separation is the full-graph distance, not a subgraph one
    e1 = embed(g, EmbedConfig(kappa=1), 2, mask=mask)
    a, b = e1.pivots[0]
    assert abs(e1.point(a)[0] - e1.point(b)[0]) == pytest.approx(floyd_warshall(g)[a, b])
    with pytest.raises(GraphError):
        e.point(1)


def test_restrict_rows_identical():
    g = random_graph(np.random.default_rng(4), 25, 0.2, connected=True)
    e = embed(g, EmbedConfig(kappa=4), 0)
    r = e.restrict([2, 5, 11])
    np.testing.assert_array_equal(r.coords, e.coords[[2, 5, 11]])


def test_euclidean_distance():
    g = path_graph(3)
    e = embed(g, EmbedConfig(kappa=2), 0)
    assert euclidean_distance(e, 1, 1) == 0
    assert abs(euclidean_distance(e, 0, 2) - 2) <= 0.2


def test_waxman_distances_correlate():
    g = generators.gen_waxman(150, rng=1)
    e = embed(g, EmbedConfig(kappa=10), 1)
    D = all_pairs_distances(g)
    X = e.coords
    E = np.linalg.norm(X[:, None] - X[None], axis=2)
    iu = np.triu_indices(g.n, 1)
    assert np.corrcoef(D[iu], E[iu])[0, 1] > 0.8


# PASPD

def test_ss_paspd_single_member(backend):
    g = path_graph(3)
    np.testing.assert_allclose(ss_paspd(g, PaspdEnsemble((g,)), 0), [0, 1, 2])


def test_ss_paspd_empty_member_falls_back_to_zero(backend):
    g = path_graph(3)
    empty = Graph(3, [], [], [])
    np.testing.assert_allclose(ss_paspd(g, PaspdEnsemble((g, empty)), 0), [0, 1, 2])


def test_ss_paspd_unreachable_twice_max():
    g = path_graph(4)
    half = Graph.from_edges(4, [(0, 1, 1.0), (1, 2, 1.0)])
    np.testing.assert_allclose(ss_paspd(g, PaspdEnsemble((half,)), 0), [0, 1, 2, 4])


def _paspd_oracle(ens, n):
    """Per-member Floyd-Warshall with the twice-the-eccentricity fallback."""
    total = np.zeros((n, n))
    for h in ens.graphs:
        D = floyd_warshall(h)
        for s in range(n):
            fin = np.isfinite(D[s])
            total[s] += np.where(fin, D[s], 2 * D[s, fin].max())
    return total


def test_ss_paspd_matches_oracle(backend):
    g = random_graph(np.random.default_rng(2), 12, 0.3, connected=True)
    ens = build_paspd_ensemble(g, 2, 5, True, 0)
    M = np.vstack([ss_paspd(g, ens, s) for s in range(g.n)])
    np.testing.assert_allclose(M, _paspd_oracle(ens, g.n), rtol=1e-12)


def test_ss_paspd_symmetric_on_connected_members():
    g = random_graph(np.random.default_rng(3), 10, 0.3, integer=False, connected=True)
    h = random_graph(np.random.default_rng(4), 10, 0.5, integer=False, connected=True)
    ens = PaspdEnsemble((g, h, Graph(10, [], [], [])))
    M = np.vstack([ss_paspd(g, ens, s) for s in range(g.n)])
    np.testing.assert_allclose(M, M.T, rtol=1e-12)


def test_ensemble_trace_and_nesting():
    g = path_graph(5)
    ens = build_paspd_ensemble(g, 1, 1, False, 0)
    assert [h.m for h in ens.graphs] == [4, 0]
    ens = build_paspd_ensemble(random_graph(np.random.default_rng(0), 15, 0.3), 3, 4, True, 7)
    again = build_paspd_ensemble(random_graph(np.random.default_rng(0), 15, 0.3), 3, 4, True, 7)
    assert all(a == b for a, b in zip(ens.graphs, again.graphs))
    for prev, cur in zip(ens.graphs, ens.graphs[1:]):
        assert cur.n == prev.n
        if cur.m and cur.m < prev.m:
            assert set(cur.edge_keys().tolist()) <= set(prev.edge_keys().tolist())


def test_ensemble_lineage_lengths():
    g = random_graph(np.random.default_rng(5), 20, 0.3, connected=True)
    ens = build_paspd_ensemble(g, 4, 10, False, 1)
    f = math.ceil(g.m / 10)
    per = 1 + math.ceil(g.m / f)
    assert len(ens.graphs) == 4 * per
    assert all(h.m == 0 for h in ens.graphs[per - 1::per])


def test_paspd_prefers_multiple_paths():
    # s=0 reaches 1 through three parallel 2-paths and reaches 2 through one
    edges = [(0, 3), (3, 1), (0, 4), (4, 1), (0, 5), (5, 1), (0, 6), (6, 2)]
    g = Graph.from_edges(7, edges)
    wins = 0
    for seed in range(100):
        d = ss_paspd(g, build_paspd_ensemble(g, 4, 10, False, seed), 0)
        wins += d[1] < d[2]
    assert wins >= 90
