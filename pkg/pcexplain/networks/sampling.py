"""Farthest point sampling and k-nearest-neighbor grouping."""

import numpy as np

from pcexplain.utils.exceptions import PreconditionError


def farthest_point_sampling(points, count: int, start: int = 0) -> np.ndarray:
    """Greedy max-min selection of ``count`` point indices, beginning at ``start``.

    Ties go to the lowest index, so the result is deterministic.
    """
    array = np.asarray(points, dtype=np.float64)
    n = array.shape[0]
    if not 1 <= count <= n:
        raise PreconditionError(f"cannot sample {count} of {n} points")
    if not 0 <= start < n:
        raise PreconditionError(f"start index {start} outside [0, {n})")

    selected = np.zeros(n, dtype=bool)
    order = [start]
    selected[start] = True
    distance = np.linalg.norm(array - array[start], axis=1)
    while len(order) < count:
        candidate = np.where(selected, -1.0, distance)
        index = int(np.argmax(candidate))
        order.append(index)
        selected[index] = True
        distance = np.minimum(distance, np.linalg.norm(array - array[index], axis=1))
    return np.asarray(order, dtype=np.int64)


def knn_groups(points, centroids, pool, k: int) -> np.ndarray:
    """One row per centroid: the centroid itself then its k−1 nearest pool points.

    Distance ties go to the lowest point index.
    """
    array = np.asarray(points, dtype=np.float64)
    pool = np.asarray(pool, dtype=np.int64)
    centroids = np.asarray(centroids, dtype=np.int64)
    if not 1 <= k <= pool.shape[0]:
        raise PreconditionError(f"cannot group {k} neighbors from {pool.shape[0]} points")

    groups = np.empty((centroids.shape[0], k), dtype=np.int64)
    for row, center in enumerate(centroids):
        others = pool[pool != center]
        distance = np.sum((array[others] - array[center]) ** 2, axis=1)
        nearest = others[np.lexsort((others, distance))[: k - 1]]
        groups[row, 0] = center
        groups[row, 1:] = nearest
    return groups
