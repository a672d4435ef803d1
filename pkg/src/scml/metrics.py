"""Embedding quality metrics.

Covers sampling-distribution consistency (centroid offsets), global distance
preservation (congruence coefficient), and label agreement through a mapped
clustering accuracy, a KNN classifier, and K-means clustering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .neighbors import cross_sq_dists


class EmptyClassAfterSamplingError(ValueError):
    """A class lost all of its members in the sampled subset."""


@dataclass
class LabelVector:
    values: np.ndarray
    num_classes: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)
        if self.num_classes == 0:
            self.num_classes = int(self.values.max()) + 1 if len(self.values) else 0
        if len(self.values) and (self.values.min() < 0
                                 or self.values.max() >= self.num_classes):
            raise ValueError("labels must lie in [0, num_classes)")


@dataclass
class MetricReport:
    name: str
    value: float
    params: dict = field(default_factory=dict)

    def to_csv_row(self):
        tail = ";".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name},{self.value:.12g},{tail}"


def odoc(full, sampled_indices):
    """Sum of squared per-class centroid shifts between full and sampled data."""
    if full.labels is None:
        raise ValueError("odoc needs class labels")
    points = full.points
    labels = full.labels
    sampled = np.asarray(sampled_indices, dtype=np.int64)
    total = 0.0
    for cls in np.unique(labels):
        members = labels == cls
        picked = sampled[labels[sampled] == cls]
        if len(picked) == 0:
            raise EmptyClassAfterSamplingError(f"class {cls} has no sampled member")
        shift = points[members].mean(axis=0) - points[picked].mean(axis=0)
        total += float(shift @ shift)
    return total


def _pair_distances(points, ii, jj):
    diff = points[ii] - points[jj]
    return np.sqrt(np.sum(diff * diff, axis=1))


_FULL_PAIR_LIMIT = 20_000_000
_SAMPLED_PAIRS = 1_000_000


def congruence_coefficient(high, low, pair_budget=None, seed=0):
    """Cosine similarity between corresponding pairwise-distance vectors.

    All pairs are used when their count fits the budget; otherwise a seeded
    uniform sample of pairs estimates the coefficient.
    """
    high = np.asarray(high, dtype=np.float64)
    low = np.asarray(low, dtype=np.float64)
    n = high.shape[0]
    if low.shape[0] != n:
        raise ValueError("row counts must match")
    if n < 2:
        raise ValueError("need at least two points")
    total_pairs = n * (n - 1) // 2
    limit = _FULL_PAIR_LIMIT if pair_budget is None else pair_budget
    if total_pairs <= limit:
        ii, jj = np.triu_indices(n, k=1)
    else:
        rng = np.random.default_rng(seed)
        count = _SAMPLED_PAIRS if pair_budget is None else pair_budget
        ii = rng.integers(0, n, size=count)
        jj = rng.integers(0, n - 1, size=count)
        jj = np.where(jj >= ii, jj + 1, jj)  # uniform over ordered pairs, i != j
    dh = _pair_distances(high, ii, jj)
    dl = _pair_distances(low, ii, jj)
    denom = np.linalg.norm(dh) * np.linalg.norm(dl)
    if denom == 0.0:
        return 1.0 if np.allclose(dh, dl) else 0.0
    return float(dh @ dl / denom)


def hungarian_acc(truth, predicted):
    """Accuracy after the one-to-one class mapping that maximizes agreement."""
    t = truth.values if isinstance(truth, LabelVector) else np.asarray(truth)
    p = predicted.values if isinstance(predicted, LabelVector) else np.asarray(predicted)
    if len(t) != len(p):
        raise ValueError("label vectors must have equal length")
    n = len(t)
    if n == 0:
        return 1.0
    ct = int(t.max()) + 1
    cp = int(p.max()) + 1
    confusion = np.zeros((ct, cp), dtype=np.int64)
    np.add.at(confusion, (t, p), 1)
    rows, cols = linear_sum_assignment(confusion, maximize=True)
    return float(confusion[rows, cols].sum()) / n


def _knn_predict(train_pts, train_labels, test_pts, k):
    d2 = cross_sq_dists(test_pts, train_pts)
    order = np.argsort(d2, axis=1, kind="stable")[:, :k]
    votes = train_labels[order]
    out = np.empty(len(test_pts), dtype=np.int64)
    for i in range(len(test_pts)):
        counts = np.bincount(votes[i])
        best = counts.max()
        tied = np.flatnonzero(counts == best)
        if len(tied) == 1:
            out[i] = tied[0]
        else:
            # first neighbor in distance order whose label is among the tied
            for lbl in votes[i]:
                if counts[lbl] == best:
                    out[i] = lbl
                    break
    return out


def knn_classifier_acc(coords, labels, k=5, repeats=5, seed=0):
    """Mean KNN-classifier accuracy over repeated 25/75 train/test splits."""
    coords = np.asarray(coords, dtype=np.float64)
    lv = labels if isinstance(labels, LabelVector) else LabelVector(labels)
    n = coords.shape[0]
    rng = np.random.default_rng(seed)
    accs = []
    for _ in range(repeats):
        perm = rng.permutation(n)
        n_train = max(1, int(round(0.25 * n)))
        train, test = perm[:n_train], perm[n_train:]
        if len(test) == 0:
            train, test = perm[:-1], perm[-1:]
        k_eff = min(k, len(train))
        pred = _knn_predict(coords[train], lv.values[train], coords[test], k_eff)
        accs.append(float(np.mean(pred == lv.values[test])))
    return float(np.mean(accs))


def _kmeanspp_init(points, c, rng):
    centers = np.empty((c, points.shape[1]), dtype=np.float64)
    centers[0] = points[rng.integers(points.shape[0])]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for j in range(1, c):
        total = d2.sum()
        if total == 0.0:
            centers[j:] = centers[0]
            break
        centers[j] = points[rng.choice(points.shape[0], p=d2 / total)]
        d2 = np.minimum(d2, np.sum((points - centers[j]) ** 2, axis=1))
    return centers


def lloyd_kmeans(points, c, iterations=200, seed=0):
    """K-means with distance-weighted seeding.

    Stops early once assignments repeat. Returns (assignments, centers,
    per-iteration within-cluster SSE recorded at each assignment step).
    """
    points = np.asarray(points, dtype=np.float64)
    rng = np.random.default_rng(seed)
    centers = _kmeanspp_init(points, c, rng)
    prev = None
    sse_history = []
    assign = np.zeros(points.shape[0], dtype=np.int64)
    for _ in range(iterations):
        d2 = cross_sq_dists(points, centers)
        assign = np.argmin(d2, axis=1)
        sse_history.append(float(d2[np.arange(len(points)), assign].sum()))
        if prev is not None and np.array_equal(assign, prev):
            break
        for j in range(c):
            members = assign == j
            if members.any():
                centers[j] = points[members].mean(axis=0)
            else:
                centers[j] = points[np.argmax(d2.min(axis=1))]
        prev = assign
    return assign, centers, sse_history


def kmeans_cluster_acc(coords, labels, iterations=200, seed=0):
    """Mapped accuracy of K-means run with the true number of clusters."""
    lv = labels if isinstance(labels, LabelVector) else LabelVector(labels)
    assign, _, _ = lloyd_kmeans(coords, max(1, lv.num_classes), iterations, seed)
    return hungarian_acc(lv.values, assign)
