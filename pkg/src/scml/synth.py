"""Seeded synthetic dataset generators for benchmarks and tests."""

from __future__ import annotations

import numpy as np

from .dataio import Dataset

CUBOID_LENGTH = 10.0
CUBOID_CROSS = 1.0
_CUBOID_CENTER_OFFSET = 6.5  # unit face-to-face gap along each shared axis


def _balanced_counts(n, groups):
    base, extra = divmod(n, groups)
    return [base + (1 if i < extra else 0) for i in range(groups)]


def gen_cuboids3(n, seed=0):
    """Three equal elongated cuboids, mutually perpendicular with equidistant
    centroids; points sampled uniformly inside, labeled 0/1/2."""
    if n < 3:
        raise ValueError("need at least one point per cuboid")
    rng = np.random.default_rng(seed)
    half_len = CUBOID_LENGTH / 2.0
    half_cross = CUBOID_CROSS / 2.0
    points = []
    labels = []
    for axis, count in enumerate(_balanced_counts(n, 3)):
        lo = np.full(3, -half_cross)
        hi = np.full(3, half_cross)
        lo[axis] = _CUBOID_CENTER_OFFSET - half_len
        hi[axis] = _CUBOID_CENTER_OFFSET + half_len
        points.append(rng.uniform(lo, hi, size=(count, 3)))
        labels.extend([axis] * count)
    return Dataset(np.vstack(points), np.asarray(labels))


def gen_blobs(n, c=3, dims=2, spread=1.0, seed=0):
    """Isotropic Gaussian clusters at seeded random centers, balanced sizes."""
    if not 1 <= c <= n:
        raise ValueError("need n >= c >= 1")
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.0, 10.0, size=(c, dims))
    points = []
    labels = []
    for cls, count in enumerate(_balanced_counts(n, c)):
        points.append(centers[cls] + spread * rng.standard_normal((count, dims)))
        labels.extend([cls] * count)
    return Dataset(np.vstack(points), np.asarray(labels))


def gen_grid2d(rows, cols, jitter=0.0, seed=0):
    """Jittered lattice in the unit square (no labels)."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    rng = np.random.default_rng(seed)
    xs = np.linspace(0.0, 1.0, cols) if cols > 1 else np.array([0.5])
    ys = np.linspace(0.0, 1.0, rows) if rows > 1 else np.array([0.5])
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    if jitter > 0:
        pts = pts + rng.uniform(-jitter, jitter, size=pts.shape)
    return Dataset(pts)
