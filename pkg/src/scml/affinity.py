"""High-dimensional landmark affinities.

Builds the symmetric probability matrix over landmarks in five steps:
a second-round Euclidean KNN, shared-neighbor (SNN) scores weighted by
reverse-neighbor counts, a shrink of distances between strongly shared
pairs ("early aggregation"), a re-ranking of candidates by the shrunk
distances, and a Gaussian kernel with per-point mean-neighbor-distance
bandwidth, normalized so the whole matrix sums to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .neighbors import knn_search, rnn_counts


@dataclass
class SnnMatrix:
    """Sparse symmetric matrix of RNN-weighted shared-neighbor scores."""

    values: sp.csr_matrix


@dataclass
class ModifiedDistances:
    """Per-row aggregation-shrunk distances over each point's candidate set."""

    entries: sp.csr_matrix
    gamma: float


@dataclass
class AffinityMatrix:
    P: sp.csr_matrix          # symmetric, non-negative, sums to 1
    bandwidths: np.ndarray    # per-landmark Gaussian sigma


def k2_heuristic(N):
    """Second-round neighbor count as a piecewise function of landmark count."""
    if N >= 1000:
        return math.ceil(math.log2(N)) + 18
    if N >= 50:
        return math.ceil(N / 50) + 8
    if N >= 9:
        return 9
    return N


def _mutual_pools(g):
    """Per-row candidate sets: each row's neighbors plus its reverse neighbors."""
    n = g.n
    rows = np.repeat(np.arange(n), g.k)
    cols = g.neighbors.ravel()
    adj = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))
    pool = adj + adj.T
    pool.sort_indices()
    return adj, pool


def snn_matrix(g, rnn):
    """Pairwise shared-neighbor scores SNN_ij = sum of RNN_u over common
    neighbors u, for every distinct pair (naturally sparse)."""
    adj, _ = _mutual_pools(g)
    full = (adj @ sp.diags(rnn.counts.astype(np.float64)) @ adj.T).tocsr()
    full.setdiag(0.0)
    full.eliminate_zeros()
    full.sort_indices()
    return SnnMatrix(full)


def _row_lookup(m, i, cols):
    """Values of csr row i at the given sorted column indices (missing -> 0)."""
    start, stop = m.indptr[i], m.indptr[i + 1]
    idx = m.indices[start:stop]
    dat = m.data[start:stop]
    pos = np.searchsorted(idx, cols)
    pos = np.minimum(pos, len(idx) - 1) if len(idx) else np.zeros(len(cols), dtype=int)
    out = np.zeros(len(cols), dtype=np.float64)
    if len(idx):
        hit = idx[pos] == cols
        out[hit] = dat[pos[hit]]
    return out


def modified_distances(points, g, snn, gamma):
    """Shrink each candidate distance by (1 - SNN/row-max)^gamma.

    The row maximum is taken over the point's candidate set; rows with no
    shared neighbors anywhere keep their raw Euclidean distances.
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    points = np.asarray(points, dtype=np.float64)
    _, pool = _mutual_pools(g)
    n = g.n
    indptr = [0]
    indices = []
    data = []
    for i in range(n):
        cols = pool.indices[pool.indptr[i]:pool.indptr[i + 1]]
        snn_vals = _row_lookup(snn.values, i, cols)
        row_max = snn_vals.max() if len(snn_vals) else 0.0
        dist = np.linalg.norm(points[cols] - points[i], axis=1)
        if row_max > 0:
            dist = (1.0 - snn_vals / row_max) ** gamma * dist
        indices.append(cols)
        data.append(dist)
        indptr.append(indptr[-1] + len(cols))
    entries = sp.csr_matrix(
        (np.concatenate(data), np.concatenate(indices), np.asarray(indptr)),
        shape=(n, n))
    return ModifiedDistances(entries, gamma)


def high_dim_probabilities(points, k2, gamma, graph=None):
    """Symmetric normalized high-dimensional probability matrix over landmarks.

    For each landmark the k2 candidates nearest in modified distance are kept;
    kernel values use sigma_i equal to the mean kept distance. The conditional
    matrix is then symmetrized and scaled so the total mass is exactly one.

    ``graph`` may carry a precomputed Euclidean k2-NN graph over ``points``.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if n < 2:
        raise ValueError("need at least two landmarks")
    if not 1 <= k2 <= n - 1:
        raise ValueError(f"k2={k2} requires 1 <= k2 <= N-1 (N={n})")
    g = graph if graph is not None else knn_search(points, k2)
    rnn = rnn_counts(g)
    snn = snn_matrix(g, rnn)
    mod = modified_distances(points, g, snn, gamma)

    indptr = [0]
    indices = []
    data = []
    sigmas = np.empty(n, dtype=np.float64)
    ent = mod.entries
    for i in range(n):
        cols = ent.indices[ent.indptr[i]:ent.indptr[i + 1]]
        dist = ent.data[ent.indptr[i]:ent.indptr[i + 1]]
        order = np.argsort(dist, kind="stable")[:k2]  # cols pre-sorted by index
        kept_cols = cols[order]
        kept_d = dist[order]
        sigma = kept_d.mean()
        if sigma == 0.0:
            positive = kept_d[kept_d > 0]
            sigma = positive.min() if len(positive) else 1e-12
        sigmas[i] = sigma
        p = np.exp(-(kept_d ** 2) / (2.0 * sigma ** 2))
        sub = np.argsort(kept_cols, kind="stable")
        indices.append(kept_cols[sub])
        data.append(p[sub])
        indptr.append(indptr[-1] + len(kept_cols))
    cond = sp.csr_matrix(
        (np.concatenate(data), np.concatenate(indices), np.asarray(indptr)),
        shape=(n, n))
    total = cond.sum()
    P = ((cond + cond.T) / (2.0 * total)).tocsr()
    P.sort_indices()
    return AffinityMatrix(P, sigmas)
