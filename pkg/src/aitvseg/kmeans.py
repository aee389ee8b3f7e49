"""Seeded k-means with k-means++ starts and deterministic tie handling.

Hand-rolled instead of delegating to a library because the thresholding
stage pins behaviors a generic implementation does not guarantee: restarts
draw from independent seeded streams and the best one wins by
(cost, restart index); assignment ties go to the lowest centroid index;
an emptied cluster is reseeded at the point farthest from its assigned
centroid. Every run with the same seed is bit-identical.
"""

from __future__ import annotations

import numpy as np

RESTARTS = 5
MAX_ITERS = 100


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return (diff * diff).sum(axis=2)


def _plusplus_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]))
    centroids[0] = points[rng.integers(n)]
    best_d2 = ((points - centroids[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        probs = best_d2 / best_d2.sum()
        centroids[i] = points[rng.choice(n, p=probs)]
        d2 = ((points - centroids[i]) ** 2).sum(axis=1)
        best_d2 = np.minimum(best_d2, d2)
    return centroids


def _lloyd(points: np.ndarray, centroids: np.ndarray, max_iters: int):
    n, k = points.shape[0], centroids.shape[0]
    labels = np.full(n, -1)
    for _ in range(max_iters):
        d2 = _squared_distances(points, centroids)
        new_labels = d2.argmin(axis=1)  # ties -> lowest index
        # reseed emptied clusters, lowest index first, recomputing after each
        for _ in range(k):
            counts = np.bincount(new_labels, minlength=k)
            empty = np.flatnonzero(counts == 0)
            if empty.size == 0:
                break
            j = int(empty[0])
            assigned = d2[np.arange(n), new_labels]
            centroids[j] = points[int(assigned.argmax())]
            d2[:, j] = ((points - centroids[j]) ** 2).sum(axis=1)
            new_labels = d2.argmin(axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = labels == j
            if members.any():
                centroids[j] = points[members].mean(axis=0)
    # final assignment so labels are nearest-centroid even on max_iters exit
    d2 = _squared_distances(points, centroids)
    labels = d2.argmin(axis=1)
    cost = float(d2[np.arange(n), labels].sum())
    return labels, centroids, cost


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int,
    restarts: int = RESTARTS,
    max_iters: int = MAX_ITERS,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Cluster (n, d) points into k groups; returns (labels, centroids, cost).

    Labels are 0-based. Requires 2 <= k <= number of distinct points.
    """
    points = np.asarray(points, dtype=float)
    if k < 2:
        raise ValueError(f"need at least 2 clusters, got k={k}")
    distinct = np.unique(points, axis=0).shape[0]
    if k > distinct:
        raise ValueError(f"k={k} exceeds the {distinct} distinct point(s)")
    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        init = _plusplus_init(points, k, rng)
        labels, centroids, cost = _lloyd(points, init.copy(), max_iters)
        if best is None or cost < best[2]:
            best = (labels, centroids, cost)
    return best
