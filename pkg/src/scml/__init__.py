"""Scalable landmark-based manifold learning.

The pipeline samples near-uniform landmarks by neighborhood exclusion,
learns their low-dimensional layout with a logarithmic-kernel neighbor
embedding, and places the remaining points by distance-constrained locally
linear reconstruction.
"""

from .affinity import AffinityMatrix, high_dim_probabilities, k2_heuristic
from .clle import incorporate_all, lle_weights, optimal_scales, place_non_landmark
from .dataio import (Dataset, DedupMap, deduplicate, load_dataset,
                     minmax_normalize, write_embedding)
from .embedder import OptimizerConfig, kl_divergence, optimize_embedding
from .metrics import (LabelVector, MetricReport, congruence_coefficient,
                      hungarian_acc, kmeans_cluster_acc, knn_classifier_acc,
                      odoc)
from .neighbors import NeighborGraph, RnnCounts, knn_search, rnn_counts
from .pipeline import Diagnostics, ScmlConfig, embed
from .sampler import LandmarkPartition, pps_sample, sample_rate
from .spectral import laplacian_eigenmaps_init, pca_fit_project, symmetric_eigen
from .synth import gen_blobs, gen_cuboids3, gen_grid2d

__version__ = "0.1.0"

__all__ = [
    "AffinityMatrix", "Dataset", "DedupMap", "Diagnostics", "LabelVector",
    "LandmarkPartition", "MetricReport", "NeighborGraph", "OptimizerConfig",
    "RnnCounts", "ScmlConfig", "congruence_coefficient", "deduplicate",
    "embed", "gen_blobs", "gen_cuboids3", "gen_grid2d",
    "high_dim_probabilities", "hungarian_acc", "incorporate_all",
    "k2_heuristic", "kl_divergence", "kmeans_cluster_acc",
    "knn_classifier_acc", "knn_search", "laplacian_eigenmaps_init",
    "lle_weights", "load_dataset", "minmax_normalize", "odoc",
    "optimal_scales", "optimize_embedding", "pca_fit_project",
    "place_non_landmark", "pps_sample", "rnn_counts", "sample_rate",
    "symmetric_eigen", "write_embedding",
]
