"""Labeled synthetic datasets and their JSON manifests."""

import json
import logging
import os
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from pcexplain.pointcloud.cloud import PointCloud
from pcexplain.pointcloud.cloud_io import load_cloud, save_cloud
from pcexplain.pointcloud.shapes import SHAPE_CLASSES, make_shape
from pcexplain.utils.exceptions import ConfigError, ContractError, PreconditionError

logger = logging.getLogger(__name__)

MANIFEST_VERSION = 1
SPLITS = ("train", "test")


@dataclass(frozen=True)
class LabeledDataset:
    """Labeled clouds with a disjoint train/test assignment."""

    clouds: List[PointCloud]
    class_names: List[str]
    splits: List[str]
    seed: int

    def __post_init__(self):
        if len(self.clouds) != len(self.splits):
            raise ContractError("every cloud needs exactly one split assignment")
        for cloud, split in zip(self.clouds, self.splits):
            if split not in SPLITS:
                raise ContractError(f"unknown split {split!r}")
            if cloud.label is None or not 0 <= cloud.label < len(self.class_names):
                raise ContractError(f"cloud label {cloud.label} outside the class list")

    @property
    def num_classes(self) -> int:
        """Number of classes."""
        return len(self.class_names)

    def subset(self, split: str) -> List[PointCloud]:
        """Clouds assigned to one split, in dataset order."""
        return [c for c, s in zip(self.clouds, self.splits) if s == split]

    @property
    def train_clouds(self) -> List[PointCloud]:
        """Training split."""
        return self.subset("train")

    @property
    def test_clouds(self) -> List[PointCloud]:
        """Test split."""
        return self.subset("test")

    def majority_prior(self, split: str = "test") -> float:
        """Share of the most frequent class in a split."""
        labels = [c.label for c in self.subset(split)]
        if not labels:
            return 0.0
        return float(np.max(np.bincount(labels, minlength=self.num_classes)) / len(labels))


def generate_dataset(
    class_names: Sequence[str],
    per_class: int,
    n: int,
    seed: int,
    test_fraction: float = 0.2,
) -> LabeledDataset:
    """Sample per_class clouds of every class and split each class separately."""
    unknown = [name for name in class_names if name not in SHAPE_CLASSES]
    if unknown:
        raise ConfigError(
            f"unknown shape classes {unknown}; choose from {', '.join(SHAPE_CLASSES)}"
        )
    if per_class < 1:
        raise PreconditionError(f"per_class must be positive, got {per_class}")
    if not 0.0 <= test_fraction < 1.0:
        raise ConfigError(f"test_fraction must lie in [0, 1), got {test_fraction}")

    rng = np.random.default_rng(seed)
    cloud_seeds = rng.integers(0, 2**31 - 1, size=(len(class_names), per_class))
    test_count = int(np.floor(test_fraction * per_class))

    clouds: List[PointCloud] = []
    splits: List[str] = []
    for label, name in enumerate(class_names):
        test_members = set(rng.permutation(per_class)[:test_count].tolist())
        for i in range(per_class):
            clouds.append(make_shape(name, n, int(cloud_seeds[label, i]), label=label))
            splits.append("test" if i in test_members else "train")

    logger.info(
        "Generated %d clouds of %d points over %d classes (%d test)",
        len(clouds),
        n,
        len(class_names),
        splits.count("test"),
    )
    return LabeledDataset(clouds, list(class_names), splits, seed)


def save_dataset(dataset: LabeledDataset, out_dir: str, fmt: str = "xyz") -> str:
    """Write every cloud plus manifest.json; returns the manifest path."""
    clouds_dir = os.path.join(out_dir, "clouds")
    os.makedirs(clouds_dir, exist_ok=True)

    entries = []
    files_by_class: Dict[str, List[str]] = {name: [] for name in dataset.class_names}
    for i, (cloud, split) in enumerate(zip(dataset.clouds, dataset.splits)):
        class_name = dataset.class_names[cloud.label]
        relative = os.path.join("clouds", f"{i:05d}_{class_name}.{fmt}")
        save_cloud(cloud, os.path.join(out_dir, relative), fmt)
        entries.append(
            {"path": relative, "class": class_name, "label": cloud.label, "split": split}
        )
        files_by_class[class_name].append(relative)

    manifest = {
        "version": MANIFEST_VERSION,
        "seed": dataset.seed,
        "format": fmt,
        "class_names": dataset.class_names,
        "points_per_cloud": dataset.clouds[0].n if dataset.clouds else 0,
        "files_by_class": files_by_class,
        "clouds": entries,
    }
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w", encoding="UTF-8") as file:
        json.dump(manifest, file, indent=2, sort_keys=True)
        file.write("\n")
    logger.info("Wrote %d clouds and manifest to %s", len(entries), out_dir)
    return manifest_path


def load_dataset(manifest_path: str) -> LabeledDataset:
    """Read a manifest and every cloud it lists (paths relative to the manifest)."""
    with open(manifest_path, "r", encoding="UTF-8") as file:
        manifest = json.load(file)
    if manifest.get("version") != MANIFEST_VERSION:
        raise ConfigError(
            f"{manifest_path}: manifest version {manifest.get('version')} is not supported"
        )
    base_dir = os.path.dirname(os.path.abspath(manifest_path))
    fmt = manifest.get("format", "xyz")
    clouds, splits = [], []
    for entry in manifest["clouds"]:
        clouds.append(
            load_cloud(os.path.join(base_dir, entry["path"]), fmt, label=int(entry["label"]))
        )
        splits.append(entry["split"])
    return LabeledDataset(clouds, list(manifest["class_names"]), splits, int(manifest["seed"]))
