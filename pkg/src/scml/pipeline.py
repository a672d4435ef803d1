"""End-to-end embedding pipeline: sample landmarks, learn their layout,
incorporate everything else."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import affinity, clle, dataio, embedder, sampler, spectral
from .neighbors import knn_search, rnn_counts


class TooFewPointsError(ValueError):
    """Not enough rows to embed at the requested dimension."""


@dataclass
class ScmlConfig:
    """Pipeline settings. ``k2=None`` selects the landmark-count heuristic."""

    k1: int = 20
    k2: int | None = None
    dim: int = 2
    gamma: float = 1.2
    optimizer: embedder.OptimizerConfig = field(
        default_factory=embedder.OptimizerConfig)
    pca_points_threshold: int = 5000
    pca_dims_threshold: int = 50
    pca_target_rate: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.k1 < 0:
            raise ValueError("k1 must be >= 0")
        if self.k2 is not None and self.k2 < 1:
            raise ValueError("k2 must be >= 1")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if min(self.pca_points_threshold, self.pca_dims_threshold) <= 0:
            raise ValueError("PCA gate thresholds must be positive")
        if not 0 < self.pca_target_rate < 1:
            raise ValueError("pca_target_rate must be in (0, 1)")


@dataclass
class StageTiming:
    stage: str
    wall_ms: float
    detail: dict = field(default_factory=dict)


@dataclass
class Diagnostics:
    landmark_count: int = 0
    sample_rate: float = 0.0
    k2: int = 0
    loss_history: list = field(default_factory=list)
    stages: list = field(default_factory=list)


class _Timer:
    def __init__(self, diag):
        self.diag = diag

    def record(self, stage, started, **detail):
        wall_ms = (time.perf_counter() - started) * 1000.0
        self.diag.stages.append(StageTiming(stage, wall_ms, detail))


def embed(d, cfg=None):
    """Embed a dataset into ``cfg.dim`` dimensions.

    Stages: exact-duplicate removal, min-max scaling, optional PCA for the
    neighbor searches on large high-dimensional data, landmark sampling,
    landmark affinity construction, spectral initialization, gradient-descent
    layout optimization, and constrained placement of the remaining points.

    Returns (coords, diagnostics); coords has one row per input row, in input
    order, with duplicate rows sharing coordinates.
    """
    cfg = cfg or ScmlConfig()
    if d.n < cfg.dim + 2:
        raise TooFewPointsError(f"n={d.n} cannot support dim={cfg.dim}")
    diag = Diagnostics()
    timer = _Timer(diag)

    t0 = time.perf_counter()
    reduced, dmap = dataio.deduplicate(d)
    timer.record("dedup", t0, kept=reduced.n, removed=len(dmap))

    t0 = time.perf_counter()
    norm = dataio.minmax_normalize(reduced)
    points = norm.points
    timer.record("normalize", t0)

    n = points.shape[0]
    use_pca = n > cfg.pca_points_threshold and points.shape[1] > cfg.pca_dims_threshold
    t0 = time.perf_counter()
    if use_pca:
        _, search = spectral.pca_fit_project(points, cfg.pca_target_rate)
    else:
        search = points
    timer.record("pca", t0, used=use_pca, search_dims=search.shape[1])

    t0 = time.perf_counter()
    if cfg.k1 == 0:
        part = sampler.all_landmarks(n)
    else:
        g1 = knn_search(search, cfg.k1)
        part = sampler.pps_sample(g1, rnn_counts(g1))
    rate = sampler.sample_rate(part, n)
    diag.landmark_count = part.count
    diag.sample_rate = rate
    timer.record("sampling", t0, landmark_count=part.count, sample_rate=rate)

    n_land = part.count
    if n_land < cfg.dim + 1:
        raise clle.TooFewLandmarksError(
            f"{n_land} landmarks cannot support dim={cfg.dim}; lower k1")
    land = part.landmarks
    search_l = search[land]
    points_l = points[land]

    k2 = cfg.k2 if cfg.k2 is not None else affinity.k2_heuristic(n_land)
    k2 = min(k2, n_land - 1)
    diag.k2 = k2
    t0 = time.perf_counter()
    g2 = knn_search(search_l, k2)
    aff = affinity.high_dim_probabilities(search_l, k2, cfg.gamma, graph=g2)
    timer.record("affinity", t0, k2=k2)

    t0 = time.perf_counter()
    init = spectral.laplacian_eigenmaps_init(aff, cfg.dim)
    timer.record("init", t0)

    t0 = time.perf_counter()
    opt_cfg = cfg.optimizer.resolved(n_land)
    coords_l, losses = embedder.optimize_embedding(aff, init, opt_cfg)
    diag.loss_history = losses
    timer.record("optimize", t0, epochs=opt_cfg.epochs)

    coords = np.empty((n, cfg.dim), dtype=np.float64)
    coords[land] = coords_l
    if len(part.non_landmarks):
        t0 = time.perf_counter()
        scales = clle.optimal_scales(g2, points_l, coords_l)
        timer.record("scales", t0)

        t0 = time.perf_counter()
        nl = part.non_landmarks
        coords[nl] = clle.incorporate_all(
            points[nl], points_l, coords_l, scales, cfg.dim,
            search_nl=search[nl], search_l=search_l)
        timer.record("clle", t0, placed=len(nl))

    t0 = time.perf_counter()
    full = coords[dmap.expand_rows(n)]
    timer.record("assemble", t0)
    return full, diag
