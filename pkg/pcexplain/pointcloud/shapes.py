"""Seeded surface sampling of the synthetic shape classes."""

import logging
from typing import Callable, Dict, NamedTuple

import numpy as np

from pcexplain.pointcloud.cloud import PointCloud, normalize_unit_sphere
from pcexplain.utils.exceptions import ConfigError, PreconditionError

logger = logging.getLogger(__name__)

MIN_POINTS = 32


class FlangeGeometry(NamedTuple):
    """Flat annulus with circular holes on a ring."""

    inner_radius: float = 0.3
    outer_radius: float = 1.0
    hole_radius: float = 0.12
    hole_ring_radius: float = 0.65


FLANGE = FlangeGeometry()


def hole_centers(num_holes: int, geometry: FlangeGeometry = FLANGE) -> np.ndarray:
    """Hole centers in the z=0 plane, equally spaced in angle starting at angle 0."""
    angles = 2 * np.pi * np.arange(num_holes) / num_holes
    return geometry.hole_ring_radius * np.stack(
        [np.cos(angles), np.sin(angles), np.zeros(num_holes)], axis=1
    )


def _unit_vectors(rng: np.random.Generator, count: int) -> np.ndarray:
    raw = rng.normal(size=(count, 3))
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    return raw / np.where(norms == 0, 1.0, norms)


def _sample_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    # antipodal pairs (plus one zero-sum triple when n is odd) keep the centroid
    # at the origin, so every point keeps the same radius after centering
    parts = []
    pairs = n // 2
    if n % 2:
        pairs -= 1
        axis, start = _unit_vectors(rng, 2)
        start = start - axis * np.dot(start, axis)
        start /= np.linalg.norm(start)
        cross = np.cross(axis, start)
        parts.append(
            np.stack(
                [np.cos(a) * start + np.sin(a) * cross for a in (0, 2 * np.pi / 3, 4 * np.pi / 3)]
            )
        )
    directions = _unit_vectors(rng, pairs)
    parts.append(np.concatenate([directions, -directions]))
    return np.concatenate(parts[::-1])


def _sample_box(rng: np.random.Generator, n: int) -> np.ndarray:
    faces = rng.integers(0, 6, size=n)
    points = rng.uniform(-1.0, 1.0, size=(n, 3))
    axes = faces % 3
    points[np.arange(n), axes] = np.where(faces < 3, 1.0, -1.0)
    return points


def _sample_cylinder(rng: np.random.Generator, n: int) -> np.ndarray:
    # radius 1, height 2: lateral area 4π, each cap π
    part = rng.choice(3, size=n, p=[4 / 6, 1 / 6, 1 / 6])
    angle = rng.uniform(0, 2 * np.pi, size=n)
    radius = np.where(part == 0, 1.0, np.sqrt(rng.uniform(0, 1, size=n)))
    height = np.select([part == 0, part == 1], [rng.uniform(-1, 1, size=n), 1.0], -1.0)
    return np.stack([radius * np.cos(angle), radius * np.sin(angle), height], axis=1)


def _flange_sampler(num_holes: int) -> Callable[[np.random.Generator, int], np.ndarray]:
    def _sample(rng: np.random.Generator, n: int) -> np.ndarray:
        centers = hole_centers(num_holes)[:, :2]
        accepted: list[np.ndarray] = []
        count = 0
        while count < n:
            batch = 2 * n
            radius = np.sqrt(
                rng.uniform(FLANGE.inner_radius**2, FLANGE.outer_radius**2, size=batch)
            )
            angle = rng.uniform(0, 2 * np.pi, size=batch)
            xy = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)
            distance = np.linalg.norm(xy[:, None, :] - centers[None, :, :], axis=2)
            keep = xy[np.all(distance > FLANGE.hole_radius, axis=1)]
            accepted.append(keep)
            count += keep.shape[0]
        xy = np.concatenate(accepted)[:n]
        return np.concatenate([xy, np.zeros((n, 1))], axis=1)

    return _sample


SHAPE_SAMPLERS: Dict[str, Callable[[np.random.Generator, int], np.ndarray]] = {
    "sphere": _sample_sphere,
    "box": _sample_box,
    "cylinder": _sample_cylinder,
    "flange4": _flange_sampler(4),
    "flange8": _flange_sampler(8),
}

SHAPE_CLASSES = tuple(SHAPE_SAMPLERS)


def make_shape(shape_class: str, n: int, seed: int, label=None) -> PointCloud:
    """Sample n surface points of a shape class, normalized to the unit sphere.

    The same (class, n, seed) always yields the same cloud.
    """
    sampler = SHAPE_SAMPLERS.get(shape_class)
    if sampler is None:
        raise ConfigError(
            f"unknown shape class {shape_class!r}; choose from {', '.join(SHAPE_CLASSES)}"
        )
    if n < MIN_POINTS:
        raise PreconditionError(f"shapes need at least {MIN_POINTS} points, got {n}")
    rng = np.random.default_rng(seed)
    points = normalize_unit_sphere(sampler(rng, n))
    return PointCloud.from_points(points, label=label)

