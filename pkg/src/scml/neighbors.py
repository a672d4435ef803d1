"""Exact k-nearest-neighbor search and reverse-nearest-neighbor counts.

Distances are plain Euclidean. Ties are broken by ascending point index so
that repeated runs (and structured inputs such as lattices) always yield the
same graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class KTooLargeError(ValueError):
    """Requested more neighbors than there are other points."""


@dataclass
class NeighborGraph:
    neighbors: np.ndarray  # (n, k) int64, ascending (distance, index), self excluded
    distances: np.ndarray  # (n, k) float64 Euclidean distances
    k: int

    @property
    def n(self):
        return self.neighbors.shape[0]


@dataclass
class RnnCounts:
    counts: np.ndarray  # (n,) int64, counts[u] = #points listing u as a neighbor


def row_chunk(n_cols, cap=512):
    """Row block size keeping the (rows x n_cols) work buffers cache-friendly."""
    return max(1, min(cap, (1 << 22) // max(1, n_cols)))


def cross_sq_dists(a, b, out=None, tmp=None):
    """Exact squared Euclidean distances between two point sets.

    Accumulated per feature dimension; avoids the a^2+b^2-2ab shortcut whose
    cancellation error would perturb tie detection. ``out``/``tmp`` may carry
    preallocated (len(a), len(b)) buffers.
    """
    shape = (a.shape[0], b.shape[0])
    out = np.empty(shape) if out is None else out
    tmp = np.empty(shape) if tmp is None else tmp
    out[:] = 0.0
    for d in range(a.shape[1]):
        np.subtract(a[:, d, None], b[None, :, d], out=tmp)
        tmp *= tmp
        out += tmp
    return out


def _select_row(d2_row, k):
    """Indices of the k smallest entries ordered by (distance, index)."""
    order = np.argsort(d2_row, kind="stable")
    return order[:k]


def knn_search(points, k):
    """Exact Euclidean k-nearest neighbors for every point.

    Self matches are excluded; equal distances rank by lower point index.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if not 1 <= k <= n - 1:
        raise KTooLargeError(f"k={k} requires 1 <= k <= n-1 (n={n})")

    neighbors = np.empty((n, k), dtype=np.int64)
    distances = np.empty((n, k), dtype=np.float64)
    # Candidate window beyond k; rows whose ties straddle it fall back to a
    # full sort, which keeps the index tie-break exact on lattice-like data.
    cap = min(n - 1, k + 64)
    chunk = row_chunk(n)
    buf = np.empty((chunk, n))
    tmp = np.empty((chunk, n))
    for start in range(0, n, chunk):
        rows = np.arange(start, min(start + chunk, n))
        d2 = cross_sq_dists(points[rows], points,
                            out=buf[:len(rows)], tmp=tmp[:len(rows)])
        d2[np.arange(len(rows)), rows] = np.inf
        if cap >= n - 1:
            order = np.argsort(d2, axis=1, kind="stable")[:, :k]
        else:
            part = np.argpartition(d2, cap - 1, axis=1)[:, :cap]
            part.sort(axis=1)  # pre-sort by index so the stable sort breaks ties low
            vals = np.take_along_axis(d2, part, axis=1)
            sub = np.argsort(vals, axis=1, kind="stable")
            cand = np.take_along_axis(part, sub, axis=1)
            cvals = np.take_along_axis(vals, sub, axis=1)
            order = cand[:, :k]
            unsafe = cvals[:, k - 1] == cvals[:, cap - 1]
            for i in np.flatnonzero(unsafe):
                order[i] = _select_row(d2[i], k)
        neighbors[rows] = order
        distances[rows] = np.sqrt(np.take_along_axis(d2, order, axis=1))
    return NeighborGraph(neighbors, distances, k)


def rnn_counts(g):
    """Count, for each point, how many points list it among their neighbors."""
    counts = np.bincount(g.neighbors.ravel(), minlength=g.n).astype(np.int64)
    return RnnCounts(counts)
