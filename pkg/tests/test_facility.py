import itertools
import math

import numpy as np
import pytest

from fmgt import facility, nn_index
from fmgt.embed import EmbedConfig, ShortestPath, SqrtShortestPath, embed
from fmgt.facility import FlpSolution
from fmgt.graph import Graph, GraphError

from conftest import floyd_warshall, path_graph, random_graph, star_graph


def setup(g, kappa=10, seed=0):
    e = embed(g, EmbedConfig(kappa=kappa, mode=SqrtShortestPath()), seed)
    return e, nn_index.build(e, nn_index.Exact())


def brute_kmedian(g, K, weights=None, tau=None):
    D = floyd_warshall(g)
    w = np.ones(g.n) if weights is None else np.asarray(weights, float)
    best = math.inf
    for fac in itertools.combinations(range(g.n), K):
        if tau is None:
            best = min(best, float((w * D[list(fac)].min(0)).sum()))
        else:
            # capacitated: exhaustive over assignments is too big; use a slot-expanded LP-free check
            for a in itertools.product(range(K), repeat=g.n):
                if max(np.bincount(a, minlength=K)) <= tau:
                    best = min(best, float(sum(D[fac[a[v]], v] for v in range(g.n))))
    return best


# MAM

def test_mam_one_agent(backend):
    g = random_graph(np.random.default_rng(0), 12, 0.3, connected=True)
    e, idx = setup(g)
    sol = facility.solve_mam_fastmap(g, [5], e, idx)
    assert sol.facilities == (5,) and sol.cost == 0


def test_mam_star_center():
    g = star_graph(3)
    e, idx = setup(g)
    sol = facility.solve_mam_fastmap(g, [1, 2, 3], e, idx)
    D = floyd_warshall(g)
    assert sol.cost == D[:, [1, 2, 3]].sum(1).min() == 3
    assert sol.facilities == (0,)


def test_mam_exact_path_tiebreak():
    sol = facility.solve_mam_exact(path_graph(4), [0, 3])
    assert sol.cost == 3 and sol.facilities == (0,)
    assert facility.solve_mam_exact(path_graph(4), [2]).facilities == (2,)


@pytest.mark.parametrize("seed", range(5))
def test_mam_exact_matches_enumeration(backend, seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, 10, 0.3, integer=False, connected=True)
    starts = rng.choice(10, 3, replace=False).tolist()
    D = floyd_warshall(g)
    tot = D[:, starts].sum(1)
    sol = facility.solve_mam_exact(g, starts)
    assert sol.cost == pytest.approx(tot.min())
    assert sol.facilities[0] == int(np.argmin(tot))


def test_mam_requires_sqrt_mode():
    g = path_graph(4)
    e = embed(g, EmbedConfig(kappa=2, mode=ShortestPath()), 0)
    with pytest.raises(ValueError):
        facility.solve_mam_fastmap(g, [0], e, nn_index.build(e))


def test_mam_missing_start():
    g = path_graph(5)
    e = embed(g, EmbedConfig(kappa=2, mode=SqrtShortestPath()), 0, mask=[0, 1, 2])
    with pytest.raises(GraphError):
        facility.solve_mam_fastmap(g, [4], e, nn_index.build(e))


# K-median variants

def test_vkm_k_equals_n():
    g = path_graph(5)
    e, idx = setup(g)
    sol = facility.solve_vkm(g, 5, e, idx, 0)
    assert sorted(sol.facilities) == list(range(5)) and sol.cost == 0


def test_vkm_path_within_25pct():
    g = path_graph(5)
    e, idx = setup(g)
    sol = facility.solve_vkm(g, 2, e, idx, 0)
    assert brute_kmedian(g, 2) == 3
    assert sol.cost <= 3 * 1.25


def test_vkm_dumbbell_one_per_side():
    left = [(a, b, 1.0) for a, b in itertools.combinations(range(5), 2)]
    right = [(a + 5, b + 5, 1.0) for a, b in itertools.combinations(range(5), 2)]
    g = Graph.from_edges(10, left + right + [(0, 5, 20.0)])
    e, idx = setup(g)
    sol = facility.solve_vkm(g, 2, e, idx, 0)
    assert {f < 5 for f in sol.facilities} == {True, False}
    assert sol.cost == brute_kmedian(g, 2)


def test_wvkm_heavy_vertex():
    g = random_graph(np.random.default_rng(1), 10, 0.3, connected=True)
    w = np.ones(10)
    w[7] = 1e6
    e, idx = setup(g)
    sol = facility.solve_wvkm(g, 1, e, idx, w, 0)
    assert sol.facilities == (7,)


def test_wvkm_equal_weights_match_vkm():
    g = random_graph(np.random.default_rng(2), 14, 0.3, connected=True)
    e, idx = setup(g)
    a = facility.solve_vkm(g, 2, e, idx, 5)
    b = facility.solve_wvkm(g, 2, e, idx, np.full(14, 3.0), 5)
    assert a.facilities == b.facilities


def test_wvkm_zero_weights_zero_cost():
    g = random_graph(np.random.default_rng(3), 10, 0.3, connected=True)
    e, idx = setup(g)
    assert facility.solve_wvkm(g, 2, e, idx, np.zeros(10), 0).cost == 0


def test_wvkm_missing_weights():
    g = path_graph(4)
    e, idx = setup(g)
    with pytest.raises(GraphError):
        facility.solve_wvkm(g, 1, e, idx)


def test_cvkm_capacity_and_default_tau():
    g = path_graph(4)
    e, idx = setup(g)
    sol = facility.solve_cvkm(g, 2, e, idx, 2, 0)
    assert np.bincount(sol.assignment, minlength=2).max() <= 2
    g = random_graph(np.random.default_rng(4), 15, 0.3, connected=True)
    e, idx = setup(g)
    sol = facility.solve_cvkm(g, 4, e, idx, rng=0)
    assert sol.tau == math.ceil(2 * 15 / 4)
    assert np.bincount(sol.assignment).max() <= sol.tau


def test_cvkm_tau_n_matches_vkm():
    g = random_graph(np.random.default_rng(6), 12, 0.3, connected=True)
    e, idx = setup(g)
    a = facility.solve_cvkm(g, 2, e, idx, 12, 3)
    b = facility.solve_vkm(g, 2, e, idx, 3)
    assert sorted(a.facilities) == sorted(b.facilities)


def test_cvkm_infeasible():
    g = path_graph(5)
    e, idx = setup(g)
    with pytest.raises(GraphError):
        facility.solve_cvkm(g, 2, e, idx, 2)


def test_k_out_of_range():
    g = path_graph(3)
    e, idx = setup(g)
    with pytest.raises(GraphError):
        facility.solve_vkm(g, 4, e, idx)


# evaluation and the exhaustive baseline

def test_evaluate_examples():
    g = star_graph(4)
    assert facility.evaluate_flp(g, FlpSolution("vkm", (0,), 0, "x")) == 4
    assert facility.evaluate_flp(g, FlpSolution("vkm", tuple(range(5)), 0, "x")) == 0


def test_evaluate_rejects_capacity_violation():
    g = path_graph(4)
    sol = FlpSolution("cvkm", (0, 3), 0, "x", assignment=np.array([0, 0, 0, 1]), tau=2)
    with pytest.raises(GraphError):
        facility.evaluate_flp(g, sol)


def test_evaluate_rejects_duplicates():
    with pytest.raises(GraphError):
        facility.evaluate_flp(path_graph(4), FlpSolution("vkm", (1, 1), 0, "x"))


@pytest.mark.parametrize("seed", range(6))
def test_exhaustive_matches_brute(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, 7, 0.4, connected=True)
    w = rng.uniform(0, 5, 7)
    assert facility.solve_exhaustive(g, "vkm", 2).cost == pytest.approx(brute_kmedian(g, 2))
    assert facility.solve_exhaustive(g, "wvkm", 2, weights=w).cost == pytest.approx(brute_kmedian(g, 2, w))
    sol = facility.solve_exhaustive(g, "cvkm", 2, tau=4)
    assert sol.cost == pytest.approx(brute_kmedian(g, 2, tau=4))
    assert facility.evaluate_flp(g, sol) == pytest.approx(sol.cost)


@pytest.mark.parametrize("seed", range(8))
def test_solver_costs_are_graph_true_and_above_optimum(backend, seed):
    rng = np.random.default_rng(50 + seed)
    n = int(rng.integers(8, 16))
    g = random_graph(rng, n, 0.3, connected=True)
    w = rng.uniform(0, 4, n)
    e, idx = setup(g, seed=seed)
    for K in (1, 2, 3):
        sols = [facility.solve_vkm(g, K, e, idx, seed), facility.solve_wvkm(g, K, e, idx, w, seed),
                facility.solve_cvkm(g, K, e, idx, rng=seed)]
        for sol in sols:
            assert len(set(sol.facilities)) == K
            got = facility.evaluate_flp(g, sol, weights=w)
            assert got == sol.cost
            opt = facility.solve_exhaustive(g, sol.problem, K, sol.tau, w).cost
            assert sol.cost >= opt - 1e-9


def test_suboptimality_definition():
    assert facility.suboptimality(107.08, 100) == pytest.approx(0.0708)
    assert facility.suboptimality(0, 0) == 0


def test_centers_to_vertices_repairs_duplicates():
    idx = nn_index.NnIndex(np.array([[0.0], [1.0], [2.0]]), [0, 1, 2])
    fac, gaps = facility.centers_to_vertices(np.array([[0.1], [0.2]]), idx)
    assert fac == [0, 1] and gaps[1] == pytest.approx(0.8)


def test_solution_json_schema():
    g = path_graph(4)
    e, idx = setup(g)
    js = facility.solve_cvkm(g, 2, e, idx, 2, 0).to_json(42)
    assert {"problem", "K", "tau", "facilities", "assignment", "cost", "seed"} <= js.keys()
