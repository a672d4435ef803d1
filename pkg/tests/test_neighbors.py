import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from _oracles import brute_force_knn
from scml.neighbors import KTooLargeError, knn_search, rnn_counts


def test_collinear_nearest():
    pts = np.array([[0.0], [1.0], [3.0]])
    g = knn_search(pts, 1)
    np.testing.assert_array_equal(g.neighbors.ravel(), [1, 0, 1])
    np.testing.assert_allclose(g.distances.ravel(), [1.0, 1.0, 2.0])


def test_full_ranking_k_equals_n_minus_1():
    rng = np.random.default_rng(1)
    pts = rng.random((9, 3))
    g = knn_search(pts, 8)
    nb, dist = brute_force_knn(pts, 8)
    np.testing.assert_array_equal(g.neighbors, nb)
    np.testing.assert_allclose(g.distances, dist, rtol=1e-12)
    for i in range(9):
        assert set(g.neighbors[i]) == set(range(9)) - {i}


def test_matches_brute_force_200_points():
    rng = np.random.default_rng(42)
    pts = rng.standard_normal((200, 5))
    g = knn_search(pts, 10)
    nb, dist = brute_force_knn(pts, 10)
    np.testing.assert_array_equal(g.neighbors, nb)
    np.testing.assert_allclose(g.distances, dist, rtol=1e-12)


def test_lattice_exact_ties_break_by_index():
    pts = np.array([[i, j] for i in range(6) for j in range(6)], dtype=float)
    g = knn_search(pts, 5)
    nb, _ = brute_force_knn(pts, 5)
    np.testing.assert_array_equal(g.neighbors, nb)


def test_k_bounds():
    pts = np.zeros((4, 2))
    with pytest.raises(KTooLargeError):
        knn_search(pts, 4)
    with pytest.raises(KTooLargeError):
        knn_search(pts, 0)


def test_no_self_and_sorted_distances():
    rng = np.random.default_rng(5)
    pts = rng.random((60, 4))
    g = knn_search(pts, 7)
    for i in range(60):
        assert i not in g.neighbors[i]
        assert np.all(np.diff(g.distances[i]) >= 0)
        direct = np.linalg.norm(pts[g.neighbors[i]] - pts[i], axis=1)
        np.testing.assert_allclose(g.distances[i], direct, rtol=1e-12)


def test_determinism():
    rng = np.random.default_rng(11)
    pts = rng.random((80, 3))
    a = knn_search(pts, 6)
    b = knn_search(pts.copy(), 6)
    np.testing.assert_array_equal(a.neighbors, b.neighbors)
    np.testing.assert_array_equal(a.distances, b.distances)


def test_rnn_examples():
    g = knn_search(np.array([[0.0], [1.0], [3.0]]), 1)
    np.testing.assert_array_equal(rnn_counts(g).counts, [1, 2, 0])

    pair = knn_search(np.array([[0.0], [1.0]]), 1)
    np.testing.assert_array_equal(rnn_counts(pair).counts, [1, 1])


def test_rnn_sum_identity_random():
    rng = np.random.default_rng(3)
    pts = rng.random((100, 2))
    g = knn_search(pts, 9)
    assert rnn_counts(g).counts.sum() == 100 * 9


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(3, 24), st.integers(1, 3)),
              elements=st.floats(-10, 10, allow_nan=False).map(lambda v: round(v, 2))),
       st.integers(1, 5))
def test_property_matches_brute_force(values, k):
    k = min(k, len(values) - 1)
    g = knn_search(values, k)
    nb, _ = brute_force_knn(values, k)
    np.testing.assert_array_equal(g.neighbors, nb)
    assert rnn_counts(g).counts.sum() == len(values) * k
