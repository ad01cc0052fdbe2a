"""Point cloud and heatmap values, point dropping and normalization."""

from dataclasses import dataclass, replace
from typing import Iterable, Optional

import numpy as np

from pcexplain.utils.exceptions import ContractError, PointIndexError, PreconditionError

HEATMAP_TOLERANCE = 1e-12


def _frozen(array: np.ndarray) -> np.ndarray:
    copy = np.array(array, copy=True)
    copy.setflags(write=False)
    return copy


@dataclass(frozen=True, eq=False)
class PointCloud:
    """n points with bookkeeping for explanation and dropping.

    ``core`` is the centroid of the points as loaded. Dropped points are moved
    there, so ``n`` never changes. ``alive_mask`` is False for dropped points and
    ``explained_mask`` is True for points an explanation already covered.
    """

    points: np.ndarray
    core: np.ndarray
    explained_mask: np.ndarray
    alive_mask: np.ndarray
    label: Optional[int] = None

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 3 or points.shape[0] < 1:
            raise PreconditionError(f"a point cloud needs n ≥ 1 rows of 3, got {points.shape}")
        if not np.all(np.isfinite(points)):
            raise ContractError("point coordinates must be finite")
        n = points.shape[0]
        for name in ("explained_mask", "alive_mask"):
            mask = np.asarray(getattr(self, name), dtype=bool)
            if mask.shape != (n,):
                raise ContractError(f"{name} has shape {mask.shape}, expected ({n},)")
            object.__setattr__(self, name, _frozen(mask))
        object.__setattr__(self, "points", _frozen(points))
        object.__setattr__(self, "core", _frozen(np.asarray(self.core, dtype=np.float64)))

    @classmethod
    def from_points(cls, points, label: Optional[int] = None) -> "PointCloud":
        """Build a fresh cloud: nothing dropped, nothing explained, core = centroid."""
        array = np.asarray(points, dtype=np.float64)
        if array.ndim != 2 or array.shape[0] < 1:
            raise PreconditionError(f"a point cloud needs n ≥ 1 rows of 3, got {array.shape}")
        n = array.shape[0]
        return cls(
            points=array,
            core=array.mean(axis=0),
            explained_mask=np.zeros(n, dtype=bool),
            alive_mask=np.ones(n, dtype=bool),
            label=label,
        )

    @property
    def n(self) -> int:
        """Number of points, dropped ones included."""
        return int(self.points.shape[0])

    def fresh(self) -> "PointCloud":
        """Same coordinates and core with both masks reset."""
        return replace(
            self,
            explained_mask=np.zeros(self.n, dtype=bool),
            alive_mask=np.ones(self.n, dtype=bool),
        )


@dataclass(frozen=True, eq=False)
class Heatmap:
    """Per-point relevance in [0, 1]; max is 1 unless every value is 0."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ContractError(f"heatmap values must be a vector, got {values.shape}")
        if values.size and (
            values.min() < -HEATMAP_TOLERANCE or values.max() > 1 + HEATMAP_TOLERANCE
        ):
            raise ContractError("heatmap values must lie in [0, 1]")
        if values.size and values.max() > 0 and abs(values.max() - 1.0) > HEATMAP_TOLERANCE:
            raise ContractError("a non-zero heatmap must have maximum 1")
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def from_raw(cls, raw) -> "Heatmap":
        """Min-max normalize raw relevance into a heatmap."""
        return cls(minmax_normalize(raw))

    @property
    def n(self) -> int:
        """Number of points covered."""
        return int(self.values.shape[0])

    def check_aligned(self, cloud: PointCloud) -> None:
        """Raise unless the heatmap has one value per point of the cloud."""
        if self.n != cloud.n:
            raise ContractError(f"heatmap has {self.n} values for a cloud of {cloud.n} points")


def centroid(cloud: PointCloud) -> np.ndarray:
    """Arithmetic mean of the cloud's coordinates as originally loaded."""
    return cloud.core.copy()


def _checked_indices(cloud: PointCloud, indices: Iterable[int]) -> np.ndarray:
    index = np.unique(np.asarray(list(indices), dtype=np.int64))
    if index.size and (index[0] < 0 or index[-1] >= cloud.n):
        raise PointIndexError(f"point index out of range for a cloud of {cloud.n} points")
    return index


def drop_points(cloud: PointCloud, indices: Iterable[int]) -> PointCloud:
    """Shift the listed points to the cloud's core and mark them dropped."""
    index = _checked_indices(cloud, indices)
    if not np.all(cloud.alive_mask[index]):
        dead = index[~cloud.alive_mask[index]]
        raise PointIndexError(f"points already dropped: {dead.tolist()}")
    points = np.array(cloud.points)
    points[index] = cloud.core
    alive = np.array(cloud.alive_mask)
    alive[index] = False
    return replace(cloud, points=points, alive_mask=alive)


def mark_explained(cloud: PointCloud, indices: Iterable[int]) -> PointCloud:
    """Set explained_mask for the listed points."""
    index = _checked_indices(cloud, indices)
    explained = np.array(cloud.explained_mask)
    explained[index] = True
    return replace(cloud, explained_mask=explained)


def minmax_normalize(values) -> np.ndarray:
    """(v − min)/(max − min); all zeros when max == min."""
    array = np.asarray(values, dtype=np.float64)
    if array.size == 0:
        return array.copy()
    if not np.all(np.isfinite(array)):
        raise ContractError("cannot normalize non-finite values")
    low, high = array.min(), array.max()
    if high == low:
        return np.zeros_like(array)
    return (array - low) / (high - low)


def normalize_unit_sphere(points) -> np.ndarray:
    """Center on the centroid and scale the farthest point to norm 1."""
    array = np.asarray(points, dtype=np.float64)
    centered = array - array.mean(axis=0)
    radius = np.max(np.linalg.norm(centered, axis=1))
    if radius == 0:
        return centered
    return centered / radius


def rank_points(values, descending: bool, candidates=None) -> np.ndarray:
    """Point indices ordered by value, ties by ascending index.

    With ``candidates`` only those indices are ranked.
    """
    array = np.asarray(values, dtype=np.float64)
    index = (
        np.arange(array.shape[0])
        if candidates is None
        else np.asarray(candidates, dtype=np.int64)
    )
    keys = -array[index] if descending else array[index]
    return index[np.lexsort((index, keys))]
