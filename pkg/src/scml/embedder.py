"""Landmark layout optimization.

The low-dimensional kernel is logarithmic, 1 / (1 + log(1 + r^2)), normalized
over all ordered point pairs. Kullback-Leibler divergence between the
high-dimensional affinities and the layout kernel is minimized by full-batch
gradient descent with a gradient-history momentum term, a constant warm-up
learning rate, and cosine annealing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp


class NonFiniteStateError(RuntimeError):
    """Coordinates left the finite range; the learning rate is too aggressive."""


@dataclass
class OptimizerConfig:
    """Learning-rate schedule and epoch budget.

    ``eta_max``/``eta_min`` default to 2.5 and 2 times the landmark count;
    leave them None and call :meth:`resolved` once that count is known.
    """

    eta_max: float | None = None
    eta_min: float | None = None
    warmup: int = 10
    epochs: int = 50
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.warmup < self.epochs:
            raise ValueError("need 0 <= warmup < epochs")
        if self.eta_max is not None and self.eta_min is not None:
            if not 0 < self.eta_min <= self.eta_max:
                raise ValueError("need 0 < eta_min <= eta_max")

    def resolved(self, n_points):
        """Fill rate defaults proportional to the number of embedded points."""
        eta_max = 2.5 * n_points if self.eta_max is None else self.eta_max
        eta_min = 2.0 * n_points if self.eta_min is None else self.eta_min
        return replace(self, eta_max=eta_max, eta_min=eta_min)


@dataclass
class EmbeddingState:
    coords: np.ndarray
    prev_gradient: np.ndarray
    epoch: int
    Z: float


def _dense_p(P):
    mat = P.P if hasattr(P, "P") else P
    return mat.toarray() if sp.issparse(mat) else np.asarray(mat, dtype=np.float64)


def _pairwise_sq(coords):
    sq = np.sum(coords ** 2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (coords @ coords.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def _kernel(d2):
    w = 1.0 / (1.0 + np.log1p(d2))
    np.fill_diagonal(w, 0.0)
    return w


def low_dim_probability(coords, i, j, Z):
    """Normalized layout kernel value q_ij = (1 + log(1 + r^2))^-1 / Z."""
    r2 = float(np.sum((coords[i] - coords[j]) ** 2))
    return 1.0 / (1.0 + np.log1p(r2)) / Z


def normalization_constant(coords):
    """Sum of the unnormalized kernel over all ordered pairs."""
    return float(_kernel(_pairwise_sq(np.asarray(coords, dtype=np.float64))).sum())


def kl_divergence(P, coords):
    """KL(P || Q) over ordered pairs, with 0 log 0 taken as 0."""
    p = _dense_p(P)
    coords = np.asarray(coords, dtype=np.float64)
    w = _kernel(_pairwise_sq(coords))
    q = w / w.sum()
    mask = p > 0
    return float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask]))))


def gradient(P, coords):
    """Analytic KL gradient with respect to every layout coordinate.

    d/dy_i = 4 sum_j (p_ij - q_ij)(y_i - y_j) /
             ((1 + r_ij^2)(1 + log(1 + r_ij^2)))
    """
    p = _dense_p(P)
    coords = np.asarray(coords, dtype=np.float64)
    d2 = _pairwise_sq(coords)
    w = _kernel(d2)
    q = w / w.sum()
    f = (p - q) * w / (1.0 + d2)
    np.fill_diagonal(f, 0.0)
    return 4.0 * (f.sum(axis=1)[:, None] * coords - f @ coords)


def learning_rate(t, cfg):
    """Warm-up at eta_max, then cosine decay down to eta_min at the last epoch."""
    if cfg.eta_max is None or cfg.eta_min is None:
        raise ValueError("config rates unresolved; call resolved() first")
    if not 1 <= t <= cfg.epochs:
        raise ValueError("epoch out of range")
    if t <= cfg.warmup:
        return cfg.eta_max
    phase = (t - cfg.warmup) / (cfg.epochs - cfg.warmup) * np.pi
    return cfg.eta_min + (cfg.eta_max - cfg.eta_min) / 2.0 * (1.0 + np.cos(phase))


def momentum_term(t):
    """Epoch-adaptive momentum coefficient (t - 1) / (t + 2)."""
    if t < 1:
        raise ValueError("epochs are 1-based")
    return (t - 1.0) / (t + 2.0)


class _EpochWorkspace:
    """Preallocated buffers for the dense per-epoch kernel recomputation.

    The affinity matrix is static, so its nonzero pattern, values, and
    entropy term are extracted once; each epoch only touches the layout
    kernel. One reciprocal pass yields the kernel, a second the repulsion
    factor w^2 / (1 + r^2); the normalization constant is folded into the
    final gradient combine instead of scaling a full matrix.
    """

    def __init__(self, p, n):
        csr = sp.csr_matrix(p)
        csr.eliminate_zeros()
        csr.sort_indices()
        self.attract = csr
        self.rows = np.repeat(np.arange(n), np.diff(csr.indptr))
        self.cols = csr.indices
        self.pv = csr.data.copy()
        self.entropy = float(np.sum(self.pv * np.log(self.pv)))
        self.d2 = np.empty((n, n))
        self.w = np.empty((n, n))
        self.rep = np.empty((n, n))
        self.diag = np.arange(n)

    def step(self, coords):
        """Returns (loss, gradient) at the given layout.

        Overflow here means the layout already diverged; the caller detects
        the resulting non-finite coordinates, so warnings are suppressed.
        """
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            return self._step(coords)

    def _step(self, coords):
        d2, w, rep = self.d2, self.w, self.rep
        sq = np.sum(coords ** 2, axis=1)
        np.matmul(coords, coords.T, out=d2)
        d2 *= -2.0
        d2 += sq[:, None]
        d2 += sq[None, :]
        np.maximum(d2, 0.0, out=d2)
        d2[self.diag, self.diag] = 0.0

        np.log1p(d2, out=w)
        w += 1.0
        np.multiply(w, w, out=rep)
        d2 += 1.0
        rep *= d2
        np.reciprocal(w, out=w)          # kernel (1 + log(1 + r^2))^-1
        np.reciprocal(rep, out=rep)      # kernel^2 / (1 + r^2)
        w[self.diag, self.diag] = 0.0
        rep[self.diag, self.diag] = 0.0
        z = float(w.sum())

        qv = w[self.rows, self.cols]
        loss = self.entropy - float(self.pv @ np.log(qv)) + np.log(z)

        av = self.pv * (qv / d2[self.rows, self.cols])  # d2 now holds 1 + r^2
        self.attract.data[:] = av
        att_sum = np.asarray(self.attract.sum(axis=1)).ravel()
        att_y = self.attract @ coords
        rep_sum = rep.sum(axis=1)
        rep_y = rep @ coords
        grad = 4.0 * ((att_sum - rep_sum / z)[:, None] * coords
                      - att_y + rep_y / z)
        return loss, grad


def optimize_embedding(P, init, cfg):
    """Run the full epoch schedule from an initial layout.

    Per epoch the kernel matrix is recomputed and the update
    y <- y - eta(t) * (grad_t + alpha(t) * grad_{t-1}) applied. Returns final
    coordinates and the loss at every visited state (epochs + 1 values, the
    last one evaluated after the final update).
    """
    p = _dense_p(P)
    coords = np.array(init.coords if hasattr(init, "coords") else init,
                      dtype=np.float64)
    n = coords.shape[0]
    cfg = cfg.resolved(n)
    prev_grad = np.zeros_like(coords)
    losses = []
    work = _EpochWorkspace(p, n)
    for t in range(1, cfg.epochs + 1):
        loss, grad = work.step(coords)
        losses.append(loss)
        coords = coords - learning_rate(t, cfg) * (grad + momentum_term(t) * prev_grad)
        if not np.all(np.isfinite(coords)):
            raise NonFiniteStateError(f"coordinates diverged at epoch {t}")
        prev_grad = grad
    losses.append(kl_divergence(p, coords))
    return coords, losses
