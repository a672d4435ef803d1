"""Plum pudding sampling: uniform landmark selection by neighborhood exclusion.

Points are visited in descending order of their reverse-nearest-neighbor
count. Each visited point that is still in the queue becomes a landmark and
its k1 nearest neighbors are moved out of the queue into the non-landmark
set, so landmarks end up roughly evenly spread through the data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LandmarkPartition:
    landmarks: np.ndarray      # selection order
    non_landmarks: np.ndarray  # ascending original index
    k1: int

    @property
    def count(self):
        return len(self.landmarks)


def pps_sample(g, rnn):
    """Greedy landmark selection over an RNN-descending queue.

    ``g`` is the first-round neighbor graph (k = k1) and ``rnn`` its reverse
    neighbor counts. RNN ties are visited in ascending index order. Neighbors
    that already left the queue (as landmarks or excluded points) are skipped.
    """
    n = g.n
    order = np.lexsort((np.arange(n), -rnn.counts))
    in_queue = np.ones(n, dtype=bool)
    landmarks = []
    for i in order:
        if not in_queue[i]:
            continue
        in_queue[i] = False
        landmarks.append(i)
        nbrs = g.neighbors[i]
        in_queue[nbrs] = False
    landmarks = np.asarray(landmarks, dtype=np.int64)
    mask = np.ones(n, dtype=bool)
    mask[landmarks] = False
    return LandmarkPartition(landmarks, np.flatnonzero(mask), g.k)


def all_landmarks(n):
    """Degenerate partition for the no-sampling configuration (k1 = 0)."""
    return LandmarkPartition(np.arange(n, dtype=np.int64),
                             np.empty(0, dtype=np.int64), 0)


def sample_rate(p, n):
    """Fraction of points kept as landmarks."""
    return p.count / n
