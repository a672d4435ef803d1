import numpy as np
import pytest

from _oracles import brute_force_mapped_acc, dense_cc
from scml.dataio import Dataset
from scml.metrics import (EmptyClassAfterSamplingError, LabelVector,
                          MetricReport, congruence_coefficient, hungarian_acc,
                          kmeans_cluster_acc, knn_classifier_acc,
                          lloyd_kmeans, odoc)


def test_odoc_full_sample_zero():
    rng = np.random.default_rng(0)
    d = Dataset(rng.random((30, 3)), labels=rng.integers(0, 3, 30))
    assert odoc(d, np.arange(30)) == pytest.approx(0.0, abs=1e-12)


def test_odoc_hand_example():
    d = Dataset(np.array([[0.0, 0.0], [2.0, 0.0]]), labels=[0, 0])
    assert odoc(d, [0]) == pytest.approx(1.0)


def test_odoc_matches_direct_recomputation():
    rng = np.random.default_rng(1)
    pts = rng.random((80, 4))
    labels = rng.integers(0, 4, 80)
    d = Dataset(pts, labels=labels)
    sample = rng.choice(80, 40, replace=False)
    expected = 0.0
    for cls in range(4):
        full_c = pts[labels == cls].mean(axis=0)
        samp = [i for i in sample if labels[i] == cls]
        samp_c = pts[samp].mean(axis=0)
        expected += float(((full_c - samp_c) ** 2).sum())
    assert odoc(d, sample) == pytest.approx(expected, rel=1e-12)


def test_odoc_empty_class():
    d = Dataset(np.zeros((4, 2)), labels=[0, 0, 1, 1])
    with pytest.raises(EmptyClassAfterSamplingError):
        odoc(d, [0, 1])


def test_cc_identity_and_scale_invariance():
    rng = np.random.default_rng(2)
    pts = rng.random((20, 3))
    assert congruence_coefficient(pts, pts.copy()) == pytest.approx(1.0)
    assert congruence_coefficient(pts, 3.5 * pts) == pytest.approx(1.0)


def test_cc_rigid_motion_invariance():
    rng = np.random.default_rng(3)
    pts = rng.random((25, 2))
    theta = 0.7
    rot = np.array([[np.cos(theta), -np.sin(theta)],
                    [np.sin(theta), np.cos(theta)]])
    moved = pts @ rot.T + np.array([4.0, -1.0])
    assert congruence_coefficient(pts, moved) == pytest.approx(1.0)


def test_cc_matches_dense_oracle():
    rng = np.random.default_rng(4)
    high = rng.random((30, 5))
    low = rng.standard_normal((30, 2))
    assert congruence_coefficient(high, low) == pytest.approx(
        dense_cc(high, low), rel=1e-12)


def test_cc_sampled_pairs_close_to_full():
    rng = np.random.default_rng(5)
    high = rng.random((200, 3))
    low = high + 0.01 * rng.standard_normal((200, 3))
    full = congruence_coefficient(high, low)
    sampled = congruence_coefficient(high, low, pair_budget=5000, seed=9)
    assert sampled == pytest.approx(full, abs=5e-3)
    twice = congruence_coefficient(high, low, pair_budget=5000, seed=9)
    assert sampled == twice


def test_hungarian_identity_and_permutation():
    truth = np.array([0, 1, 2, 0, 1, 2])
    assert hungarian_acc(truth, truth) == 1.0
    permuted = np.array([2, 0, 1, 2, 0, 1])
    assert hungarian_acc(truth, permuted) == 1.0


def test_hungarian_matches_brute_force():
    rng = np.random.default_rng(6)
    for _ in range(40):
        c = int(rng.integers(2, 7))
        n = int(rng.integers(5, 40))
        truth = rng.integers(0, c, n)
        pred = rng.integers(0, c, n)
        assert hungarian_acc(truth, pred) == pytest.approx(
            brute_force_mapped_acc(truth, pred))


def test_hungarian_beats_unmapped():
    rng = np.random.default_rng(7)
    truth = rng.integers(0, 4, 60)
    pred = rng.integers(0, 4, 60)
    unmapped = float(np.mean(truth == pred))
    assert hungarian_acc(truth, pred) >= unmapped


def test_knn_acc_separable():
    rng = np.random.default_rng(8)
    a = rng.standard_normal((40, 2)) * 0.1
    b = rng.standard_normal((40, 2)) * 0.1 + 50.0
    coords = np.vstack([a, b])
    labels = np.array([0] * 40 + [1] * 40)
    assert knn_classifier_acc(coords, labels, seed=1) == 1.0


def test_knn_acc_null_model():
    rng = np.random.default_rng(9)
    coords = rng.random((400, 2))
    labels = rng.integers(0, 2, 400)
    acc = knn_classifier_acc(coords, labels, seed=2)
    assert abs(acc - 0.5) <= 0.1


def test_knn_acc_tiny_train_set():
    coords = np.array([[0.0], [0.1], [10.0], [10.1], [10.2], [0.05], [9.9], [0.2]])
    labels = np.array([0, 0, 1, 1, 1, 0, 1, 0])
    acc = knn_classifier_acc(coords, labels, k=5, repeats=3, seed=0)
    assert 0.0 <= acc <= 1.0


def test_knn_acc_deterministic():
    rng = np.random.default_rng(10)
    coords = rng.random((50, 2))
    labels = rng.integers(0, 3, 50)
    a = knn_classifier_acc(coords, labels, seed=5)
    b = knn_classifier_acc(coords, labels, seed=5)
    assert a == b


def test_kmeans_single_class():
    rng = np.random.default_rng(11)
    coords = rng.random((20, 2))
    assert kmeans_cluster_acc(coords, np.zeros(20, dtype=int)) == 1.0


def test_kmeans_point_masses():
    coords = np.vstack([np.zeros((10, 2)), np.full((10, 2), 9.0)])
    labels = np.array([0] * 10 + [1] * 10)
    assert kmeans_cluster_acc(coords, labels, seed=3) == 1.0


def test_kmeans_sse_non_increasing():
    rng = np.random.default_rng(12)
    coords = rng.random((200, 2))
    for seed in range(5):
        _, _, history = lloyd_kmeans(coords, 4, seed=seed)
        assert all(a >= b - 1e-9 for a, b in zip(history, history[1:]))


def test_kmeans_deterministic():
    rng = np.random.default_rng(13)
    coords = rng.random((60, 2))
    labels = rng.integers(0, 3, 60)
    assert (kmeans_cluster_acc(coords, labels, seed=7)
            == kmeans_cluster_acc(coords, labels, seed=7))


def test_label_vector_validation():
    with pytest.raises(ValueError):
        LabelVector(np.array([0, 1, 3]), num_classes=2)
    lv = LabelVector(np.array([0, 2, 1]))
    assert lv.num_classes == 3


def test_metric_report_row():
    report = MetricReport("cc", 0.953, {"seed": 4, "pairs": 100})
    assert report.to_csv_row() == "cc,0.953,seed=4;pairs=100"
