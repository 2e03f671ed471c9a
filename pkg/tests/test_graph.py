import threading
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macsparse.graph import (
    SparseLaplacian,
    SparsificationProblem,
    WeightedEdge,
    build_laplacian,
    count_components,
    edge_quadratic_form,
    laplacian_at,
)
from macsparse.synthetic import random_problem

from oracles import dense_laplacian


def test_single_edge():
    L = build_laplacian([WeightedEdge(0, 1, 2.0)], 2)
    np.testing.assert_array_equal(L.toarray(), [[2, -2], [-2, 2]])


def test_empty_edge_list():
    np.testing.assert_array_equal(build_laplacian([], 3).toarray(), np.zeros((3, 3)))


def test_triangle():
    L = build_laplacian([WeightedEdge(0, 1), WeightedEdge(1, 2), WeightedEdge(0, 2)], 3).toarray()
    np.testing.assert_array_equal(np.diag(L), [2, 2, 2])
    assert np.all(L[~np.eye(3, dtype=bool)] == -1)
    np.testing.assert_allclose(np.linalg.eigvalsh(L), [0, 3, 3], atol=1e-12)


@pytest.mark.parametrize(
    "edges, n, exc",
    [
        ([WeightedEdge(0, 3)], 3, IndexError),
        ([WeightedEdge(0, 1)], 1, IndexError),
    ],
)
def test_build_errors(edges, n, exc):
    with pytest.raises(exc):
        build_laplacian(edges, n)


def test_edge_rejects_bad_input():
    with pytest.raises(ValueError):
        WeightedEdge(1, 1)
    with pytest.raises(ValueError):
        WeightedEdge(0, 1, -0.5)


def test_matches_dense_assembly(rng):
    n = 15
    edges = [(int(a), int(b), float(w)) for a, b, w in
             zip(rng.integers(0, n, 40), rng.integers(0, n, 40), rng.uniform(0, 5, 40)) if a != b]
    L = build_laplacian([WeightedEdge(*e) for e in edges], n)
    np.testing.assert_allclose(L.toarray(), dense_laplacian(n, edges), atol=1e-12)


def test_incremental_updates_match_batch(rng):
    n = 12
    L = SparseLaplacian(n)
    edges = []
    for _ in range(30):
        a, b = rng.choice(n, 2, replace=False)
        w = rng.uniform(0.1, 3)
        L.add_edge(a, b, w)
        edges.append((a, b, w))
        np.testing.assert_allclose(L.toarray(), dense_laplacian(n, edges), atol=1e-12)


def test_concurrent_reads(rng):
    P = random_problem(200, 400, 10, seed=1)
    L = laplacian_at(P, np.zeros(P.m))
    X = rng.standard_normal((200, 8))
    expected = L.toarray() @ X
    out = [None] * 8

    def work(i):
        out[i] = L @ X[:, i]

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    np.testing.assert_allclose(np.column_stack(out), expected, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.lists(st.tuples(st.integers(0, 11), st.integers(0, 11),
                                               st.floats(0, 100)), max_size=30))
def test_laplacian_invariants(n, raw):
    edges = [WeightedEdge(a, b, w) for a, b, w in raw if a != b and a < n and b < n]
    L = build_laplacian(edges, n)
    A = L.toarray()
    assert np.array_equal(A, A.T)
    scale = max(1.0, np.abs(A).max())
    assert np.abs(A @ np.ones(n)).max() <= 1e-13 * scale
    assert np.linalg.eigvalsh(A).min() >= -1e-10 * scale


def test_integer_weights_cancel_exactly():
    edges = [WeightedEdge(0, 1, 3), WeightedEdge(1, 2, 5), WeightedEdge(0, 2, 7), WeightedEdge(2, 3, 1)]
    L = build_laplacian(edges, 4)
    assert np.all(L @ np.ones(4) == 0.0)


# -- laplacian_at -----------------------------------------------------------

def _small_problem():
    fixed = [WeightedEdge(0, 1, 1.0), WeightedEdge(1, 2, 2.0)]
    cands = [WeightedEdge(0, 2, 4.0), WeightedEdge(2, 3, 1.5)]
    return SparsificationProblem(4, fixed, cands, 1)


def test_laplacian_at_zero_is_fixed_graph():
    P = _small_problem()
    np.testing.assert_allclose(
        laplacian_at(P, np.zeros(2)).toarray(), build_laplacian(P.fixed_edges, 4).toarray()
    )


def test_laplacian_at_ones_is_full_graph():
    P = _small_problem()
    np.testing.assert_allclose(
        laplacian_at(P, np.ones(2)).toarray(),
        build_laplacian(P.fixed_edges + P.candidate_edges, 4).toarray(),
    )


def test_laplacian_at_half_weight():
    P = SparsificationProblem(2, [], [WeightedEdge(0, 1, 4.0)], 1)
    np.testing.assert_allclose(laplacian_at(P, [0.5]).toarray(), [[2, -2], [-2, 2]])


def test_laplacian_at_is_affine(rng):
    P = random_problem(10, 15, 3, seed=3)
    x, y = rng.uniform(0, 0.5, 15), rng.uniform(0, 0.5, 15)
    L0 = laplacian_at(P, np.zeros(15)).toarray()
    lhs = laplacian_at(P, x + y).toarray()
    rhs = laplacian_at(P, x).toarray() + laplacian_at(P, y).toarray() - L0
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_laplacian_at_dimension_mismatch():
    with pytest.raises(ValueError):
        laplacian_at(_small_problem(), np.zeros(3))
    with pytest.raises(ValueError):
        laplacian_at(_small_problem(), [1.5, 0.0])


# -- edge_quadratic_form ----------------------------------------------------

def test_quadform_constant_vector():
    assert edge_quadratic_form(WeightedEdge(0, 1, 1.0), np.ones(5)) == 0.0


def test_quadform_unit_difference():
    assert edge_quadratic_form(WeightedEdge(0, 1, 3.0), [1, 0, 0, 0]) == 3.0


def test_quadform_matches_dense(rng):
    for _ in range(20):
        n = 8
        a, b = rng.choice(n, 2, replace=False)
        w = rng.uniform(0, 5)
        q = rng.standard_normal(n)
        L = dense_laplacian(n, [(a, b, w)])
        assert edge_quadratic_form(WeightedEdge(a, b, w), q) == pytest.approx(q @ L @ q, rel=1e-12)


@given(st.floats(0, 1e6), st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=2))
def test_quadform_nonnegative(w, q):
    assert edge_quadratic_form(WeightedEdge(0, 1, w), q) >= 0


# -- components ---------------------------------------------------------------

def test_components_no_edges():
    assert count_components([], 4) == 4


def test_components_spanning_tree():
    assert count_components([WeightedEdge(0, i) for i in range(1, 5)], 5) == 1


def test_components_two_triangles():
    tri = [(0, 1), (1, 2), (0, 2)]
    edges = [WeightedEdge(a, b) for a, b in tri] + [WeightedEdge(a + 3, b + 3) for a, b in tri]
    assert count_components(edges, 6) == 2
    vals = np.linalg.eigvalsh(build_laplacian(edges, 6).toarray())
    assert np.sum(np.abs(vals) < 1e-10) == 2


def test_zero_weight_edge_does_not_connect():
    assert count_components([WeightedEdge(0, 1, 0.0)], 2) == 2


def test_components_agree_with_spectrum(rng):
    for _ in range(100):
        n = int(rng.integers(2, 9))
        k = int(rng.integers(0, 2 * n))
        edges = []
        for _ in range(k):
            a, b = rng.choice(n, 2, replace=False)
            edges.append(WeightedEdge(int(a), int(b), float(rng.uniform(0.1, 5))))
        vals = np.linalg.eigvalsh(dense_laplacian(n, [(e.u, e.v, e.weight) for e in edges]))
        zeros = int(np.sum(vals < 1e-9))
        assert count_components(edges, n) == zeros
        assert (vals[1] > 1e-9) == (count_components(edges, n) == 1)


def test_monotonicity(rng):
    for _ in range(50):
        n = 7
        pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
        chosen = rng.permutation(len(pairs))[: rng.integers(1, len(pairs))]
        w = rng.uniform(0.1, 5, len(pairs))
        H = [(*pairs[i], w[i]) for i in chosen]
        G = H[: len(H) // 2]
        lg = np.linalg.eigvalsh(build_laplacian([WeightedEdge(*e) for e in G], n).toarray())[1]
        lh = np.linalg.eigvalsh(build_laplacian([WeightedEdge(*e) for e in H], n).toarray())[1]
        assert lg <= lh + 1e-10


# -- problem ----------------------------------------------------------------

def test_duplicates_within_list_are_merged():
    P = SparsificationProblem(3, [WeightedEdge(0, 1, 1.0), WeightedEdge(1, 0, 2.0)],
                              [WeightedEdge(1, 2, 1.0)], 1)
    assert P.fixed_edges == [WeightedEdge(0, 1, 3.0)]


def test_fixed_candidate_overlap_rejected():
    with pytest.raises(ValueError):
        SparsificationProblem(3, [WeightedEdge(0, 1)], [WeightedEdge(1, 0)], 1)


def test_budget_bounds():
    with pytest.raises(ValueError):
        SparsificationProblem(3, [], [WeightedEdge(0, 1)], 2)


def test_validate_warns_without_spanning_tree():
    P = SparsificationProblem(4, [WeightedEdge(0, 1)], [WeightedEdge(1, 2), WeightedEdge(2, 3)], 1)
    with pytest.warns(UserWarning):
        assert not P.validate()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert P.with_budget(2).validate()
