"""Placement of non-landmarks into the learned layout.

Each non-landmark is reconstructed from its dim+1 nearest landmarks with
locally linear weights, then placed at the point of the sphere around its
nearest landmark (radius = scaled high-dimensional nearest distance) that is
closest to the reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .neighbors import cross_sq_dists, row_chunk


class TooFewLandmarksError(ValueError):
    """Fewer landmarks than dim + 1; weights cannot be reconstructed."""


REGULARIZER_DELTA = 0.1
_NEAR_SINGULAR_RATIO = 1e-10


@dataclass
class LleWeights:
    indices: np.ndarray  # dim + 1 landmark indices, nearest first
    weights: np.ndarray  # sums to 1


@dataclass
class ScaleVector:
    scales: np.ndarray  # per-landmark high-to-low distance ratio


def lle_weights(x, neighborhood, indices=None):
    """Affine reconstruction weights of ``x`` from its nearest landmarks.

    The Gram matrix of landmark offsets is regularized with a trace-scaled
    ridge whenever its eigenvalue spread marks it singular or nearly so; a
    fully degenerate (all-coincident) neighborhood yields uniform weights.
    """
    x = np.asarray(x, dtype=np.float64)
    nbr = np.asarray(neighborhood, dtype=np.float64)
    m = nbr.shape[0]
    diffs = x[None, :] - nbr
    gram = diffs @ diffs.T
    trace = float(np.trace(gram))
    if trace == 0.0:
        w = np.full(m, 1.0 / m)
    else:
        eigvals = np.linalg.eigvalsh(gram)
        if eigvals[0] / eigvals[-1] < _NEAR_SINGULAR_RATIO:
            gram = gram + (REGULARIZER_DELTA ** 2 / m) * trace * np.eye(m)
        w = np.linalg.solve(gram, np.ones(m))
        w = w / w.sum()
    idx = (np.arange(m, dtype=np.int64) if indices is None
           else np.asarray(indices, dtype=np.int64))
    return LleWeights(idx, w)


def optimal_scales(landmark_knn, high_points, low_points):
    """Least-squares slope mapping high- to low-dimensional distances.

    For each landmark the slope is fit through the origin over all pairwise
    distances among its k2 nearest landmarks. A neighborhood whose high-D
    pairs are all coincident falls back to a neutral scale of 1.
    """
    high = np.asarray(high_points, dtype=np.float64)
    low = np.asarray(low_points, dtype=np.float64)
    n = landmark_knn.n
    iu, ju = np.triu_indices(landmark_knn.k, k=1)
    scales = np.empty(n, dtype=np.float64)
    for m in range(n):
        nbrs = landmark_knn.neighbors[m]
        dh = np.linalg.norm(high[nbrs[iu]] - high[nbrs[ju]], axis=1)
        dl = np.linalg.norm(low[nbrs[iu]] - low[nbrs[ju]], axis=1)
        den = float(dh @ dh)
        scales[m] = float(dh @ dl) / den if den > 0 else 1.0
    return ScaleVector(scales)


def _fallback_direction(dim, point_index):
    rng = np.random.default_rng(point_index)
    v = rng.standard_normal(dim)
    norm = np.linalg.norm(v)
    while norm == 0.0:
        v = rng.standard_normal(dim)
        norm = np.linalg.norm(v)
    return v / norm


def place_non_landmark(x, nearest_high, nearest_low, w, scale_m, point_index=0):
    """Place one non-landmark on the constraint sphere around its nearest landmark.

    ``nearest_high``/``nearest_low`` hold the dim+1 nearest landmarks, closest
    first. The placement radius is scale_m times the high-dimensional distance
    to the nearest landmark; of the two sphere points aligned with the
    reconstruction offset, the one with the smaller reconstruction error is
    returned (ties keep the outward branch).
    """
    x = np.asarray(x, dtype=np.float64)
    y_m = np.asarray(nearest_low[0], dtype=np.float64)
    d_m = scale_m * float(np.linalg.norm(x - np.asarray(nearest_high[0], dtype=np.float64)))
    recon = w.weights @ np.asarray(nearest_low, dtype=np.float64)
    r = y_m - recon
    norm_r = float(np.linalg.norm(r))
    if d_m == 0.0:
        return y_m.copy()
    direction = r / norm_r if norm_r > 0 else _fallback_direction(len(y_m), point_index)
    plus = y_m + d_m * direction
    minus = y_m - d_m * direction
    j_plus = float(np.sum((plus - recon) ** 2))
    j_minus = float(np.sum((minus - recon) ** 2))
    return plus if j_plus <= j_minus else minus


def _nearest_landmarks(queries, landmarks, count):
    """Indices of the ``count`` nearest landmarks per query, ties by index."""
    n_l = landmarks.shape[0]
    out = np.empty((queries.shape[0], count), dtype=np.int64)
    chunk = row_chunk(n_l)
    for start in range(0, queries.shape[0], chunk):
        d2 = cross_sq_dists(queries[start:start + chunk], landmarks)
        if count >= n_l:
            order = np.argsort(d2, axis=1, kind="stable")[:, :count]
        else:
            part = np.argpartition(d2, count - 1, axis=1)[:, :count]
            part.sort(axis=1)  # index pre-sort so stable sort breaks ties low
            vals = np.take_along_axis(d2, part, axis=1)
            sub = np.argsort(vals, axis=1, kind="stable")
            order = np.take_along_axis(part, sub, axis=1)
        out[start:start + chunk] = order
    return out


def _batched_weights(x, nbr):
    """Reconstruction weights for a block of points, same rules as lle_weights."""
    b, m, _ = nbr.shape
    diffs = x[:, None, :] - nbr
    gram = diffs @ diffs.transpose(0, 2, 1)
    trace = np.trace(gram, axis1=1, axis2=2)
    w = np.full((b, m), 1.0 / m)
    solvable = trace > 0
    if solvable.any():
        g = gram[solvable]
        tr = trace[solvable]
        eigvals = np.linalg.eigvalsh(g)
        ratio = eigvals[:, 0] / eigvals[:, -1]
        reg = ratio < _NEAR_SINGULAR_RATIO
        if reg.any():
            eye = np.eye(m)[None, :, :]
            g[reg] += (REGULARIZER_DELTA ** 2 / m) * tr[reg, None, None] * eye
        ws = np.linalg.solve(g, np.ones((g.shape[0], m, 1)))[:, :, 0]
        w[solvable] = ws / ws.sum(axis=1, keepdims=True)
    return w


def incorporate_all(x_nl, x_l, y_l, scales, dim,
                    search_nl=None, search_l=None):
    """Embed every non-landmark; returns coordinates in input order.

    The nearest-landmark lookup may run in a separate search space
    (``search_nl``/``search_l``, e.g. a PCA projection) while weights and the
    placement radius always use the given feature-space coordinates.
    """
    x_nl = np.asarray(x_nl, dtype=np.float64)
    x_l = np.asarray(x_l, dtype=np.float64)
    y_l = np.asarray(y_l, dtype=np.float64)
    if x_nl.shape[0] == 0:
        return np.empty((0, dim), dtype=np.float64)
    if x_l.shape[0] < dim + 1:
        raise TooFewLandmarksError(
            f"{x_l.shape[0]} landmarks cannot support dim={dim} placement")
    s_nl = x_nl if search_nl is None else np.asarray(search_nl, dtype=np.float64)
    s_l = x_l if search_l is None else np.asarray(search_l, dtype=np.float64)
    nearest = _nearest_landmarks(s_nl, s_l, dim + 1)

    w = _batched_weights(x_nl, x_l[nearest])
    y_nbr = y_l[nearest]
    y_m = y_nbr[:, 0, :]
    d_m = scales.scales[nearest[:, 0]] * np.linalg.norm(
        x_nl - x_l[nearest[:, 0]], axis=1)
    recon = np.einsum("bm,bmd->bd", w, y_nbr)
    r = y_m - recon
    norm_r = np.linalg.norm(r, axis=1)
    direction = np.zeros_like(r)
    ok = norm_r > 0
    direction[ok] = r[ok] / norm_r[ok, None]
    for i in np.flatnonzero(~ok):
        direction[i] = _fallback_direction(dim, i)
    plus = y_m + d_m[:, None] * direction
    minus = y_m - d_m[:, None] * direction
    j_plus = np.sum((plus - recon) ** 2, axis=1)
    j_minus = np.sum((minus - recon) ** 2, axis=1)
    out = np.where(j_plus[:, None] <= j_minus[:, None], plus, minus)
    out[d_m == 0.0] = y_m[d_m == 0.0]
    return out
