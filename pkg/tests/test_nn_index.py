import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fmgt import nn_index
from fmgt.embed import EmbedConfig, embed
from fmgt.nn_index import Exact, Lsh, NnIndex, TruncatedResult

from conftest import random_graph


def brute_topk(points, ids, q, k):
    d = np.linalg.norm(points - q, axis=1)
    order = np.lexsort((ids, d))
    return ids[order[:k]].tolist()


def test_exact_size_and_self_query():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 5.0]])
    idx = NnIndex(pts, [0, 1, 2], Exact())
    assert len(idx) == 3
    assert idx.query_topk(pts[2], 1) == [2]


def test_one_dimensional_example():
    idx = NnIndex(np.array([[0.0], [1.0], [5.0]]), [0, 1, 2], Exact())
    assert nn_index.query_topk(idx, [0.6], 2) == [1, 0]


def test_ties_go_to_smaller_id():
    idx = NnIndex(np.array([[1.0], [-1.0], [1.0]]), [7, 3, 5], Exact())
    assert idx.query_topk([0.0], 3) == [3, 5, 7]


def test_restriction_answers_only_members():
    g = random_graph(np.random.default_rng(0), 20, 0.3, connected=True)
    e = embed(g, EmbedConfig(kappa=3), 0)
    idx = nn_index.build(e, Exact(), restriction=[1])
    for v in range(g.n):
        assert idx.query_topk(e.point(v), 1) == [1]
    with pytest.raises(ValueError):
        nn_index.build(e, Exact(), restriction=[])


def test_truncated_flagged():
    idx = NnIndex(np.zeros((2, 2)), [0, 1], Exact())
    with pytest.warns(TruncatedResult):
        res = idx.query([0, 0], 5)
    assert res.truncated and res.ids.tolist() == [0, 1]


def test_dimension_mismatch():
    idx = NnIndex(np.zeros((2, 2)), [0, 1], Exact())
    with pytest.raises(ValueError):
        idx.query([0.0], 1)


def test_lsh_deterministic_buckets():
    pts = np.random.default_rng(1).normal(size=(100, 4))
    a = NnIndex(pts, np.arange(100), Lsh(seed=3))
    b = NnIndex(pts, np.arange(100), Lsh(seed=3))
    for ta, tb in zip(a._buckets, b._buckets):
        assert ta.keys() == tb.keys()
        assert all(np.array_equal(ta[c], tb[c]) for c in ta)


def test_lsh_recall_r4():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(200, 4))
    ids = np.arange(200)
    idx = NnIndex(pts, ids, Lsh(seed=1))
    hits = 0
    for q in rng.normal(size=(50, 4)):
        hits += len(set(idx.query_topk(q, 10)) & set(brute_topk(pts, ids, q, 10)))
    assert hits / 500 >= 0.95


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 40), st.integers(1, 5), st.integers(1, 12), st.integers(0, 2**31))
def test_exact_matches_brute_force(n, d, k, seed):
    rng = np.random.default_rng(seed)
    pts = rng.integers(-3, 4, size=(n, d)).astype(float)  # integer grid forces ties
    ids = rng.permutation(1000)[:n]
    q = rng.normal(size=d)
    idx = NnIndex(pts, ids, Exact())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncatedResult)
        res = idx.query(q, k)
    assert res.ids.tolist() == brute_topk(pts, ids, q, k)
    assert np.all(np.diff(res.dists) >= 0)
    assert len(set(res.ids.tolist())) == len(res.ids)


@settings(max_examples=30, deadline=None)
@given(st.integers(5, 60), st.integers(0, 2**31))
def test_lsh_answers_distinct_sorted(n, seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n, 3))
    idx = NnIndex(pts, np.arange(n), Lsh(seed=seed))
    res = idx.query(rng.normal(size=3), min(5, n))
    assert len(set(res.ids.tolist())) == len(res.ids)
    assert np.all(np.diff(res.dists) >= 0)
