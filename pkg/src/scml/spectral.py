"""Symmetric eigensolver, PCA projection, and spectral layout initialization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class ConvergenceFailureError(RuntimeError):
    """The iterative eigensolver failed and no dense fallback succeeded."""


@dataclass
class PcaModel:
    mean: np.ndarray        # (d,) column means
    components: np.ndarray  # (d, r) orthonormal basis, descending variance
    explained: np.ndarray   # (r,) cumulative explained-variance ratios

    def project(self, points):
        return (np.asarray(points, dtype=np.float64) - self.mean) @ self.components


@dataclass
class InitialLayout:
    coords: np.ndarray  # (N, dim), unit standard deviation per dimension


_DENSE_LIMIT = 2000


def _fix_signs(vectors):
    # Reproducible orientation: largest-magnitude entry of each vector positive.
    flips = np.sign(vectors[np.argmax(np.abs(vectors), axis=0),
                            np.arange(vectors.shape[1])])
    flips[flips == 0] = 1.0
    return vectors * flips


def symmetric_eigen(m, count, order="smallest"):
    """Extreme eigenpairs of a symmetric matrix.

    Returns (values, vectors) with values sorted ascending for
    ``order='smallest'`` and descending for ``order='largest'``; vectors are
    orthonormal columns with a deterministic sign convention.
    """
    m = np.asarray(m, dtype=np.float64)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("matrix must be square")
    if np.abs(m - m.T).max() > 1e-10 * max(1.0, np.abs(m).max()):
        raise ValueError("matrix is not symmetric")
    if not 1 <= count <= n:
        raise ValueError("count out of range")
    if order not in ("smallest", "largest"):
        raise ValueError("order must be 'smallest' or 'largest'")

    if n <= _DENSE_LIMIT or count >= n - 1:
        values, vectors = np.linalg.eigh(m)
        if order == "smallest":
            values, vectors = values[:count], vectors[:, :count]
        else:
            values, vectors = values[::-1][:count], vectors[:, ::-1][:, :count]
        return values, _fix_signs(vectors)

    which = "SA" if order == "smallest" else "LA"
    v0 = np.full(n, 1.0 / np.sqrt(n))
    try:
        values, vectors = spla.eigsh(m, k=count, which=which, v0=v0)
    except spla.ArpackNoConvergence:
        try:
            values, vectors = np.linalg.eigh(m)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailureError(str(exc)) from exc
        if order == "smallest":
            return values[:count], _fix_signs(vectors[:, :count])
        return values[::-1][:count], _fix_signs(vectors[:, ::-1][:, :count])
    idx = np.argsort(values)
    if order == "largest":
        idx = idx[::-1]
    return values[idx], _fix_signs(vectors[:, idx])


def pca_fit_project(points, target_rate=0.8):
    """Center the data and project onto the fewest components whose cumulative
    explained-variance ratio exceeds ``target_rate``."""
    points = np.asarray(points, dtype=np.float64)
    n, d = points.shape
    if n < 2:
        raise ValueError("PCA needs at least two rows")
    mean = points.mean(axis=0)
    centered = points - mean
    cov = centered.T @ centered / (n - 1)
    values, vectors = symmetric_eigen(cov, d, order="largest")
    values = np.maximum(values, 0.0)
    total = values.sum()
    if total == 0.0:
        ratios = np.ones(d)
    else:
        ratios = np.cumsum(values) / total
    rank = int(np.searchsorted(ratios, target_rate) + 1)
    rank = min(rank, d)
    model = PcaModel(mean, vectors[:, :rank], ratios[:rank])
    return model, centered @ model.components


def laplacian_eigenmaps_init(P, dim):
    """Initial layout from the bottom nontrivial eigenvectors of the
    symmetric normalized graph Laplacian of the affinity matrix.

    Each output dimension is rescaled to unit standard deviation.
    """
    mat = P.P if hasattr(P, "P") else P
    dense = mat.toarray() if sp.issparse(mat) else np.asarray(mat, dtype=np.float64)
    n = dense.shape[0]
    if dim + 1 > n:
        raise ValueError("dim + 1 eigenvectors exceed matrix size")
    degrees = dense.sum(axis=1)
    degrees = np.where(degrees > 0, degrees, 1e-12)  # isolated rows get self-loops
    inv_sqrt = 1.0 / np.sqrt(degrees)
    lap = np.eye(n) - inv_sqrt[:, None] * dense * inv_sqrt[None, :]
    lap = (lap + lap.T) / 2.0
    _, vectors = symmetric_eigen(lap, dim + 1, order="smallest")
    coords = vectors[:, 1:dim + 1].copy()
    std = coords.std(axis=0)
    coords /= np.where(std > 0, std, 1.0)
    return InitialLayout(coords)
