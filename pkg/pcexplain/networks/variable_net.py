"""Sampling-and-grouping classifier: n′ centroid rows for n points (n′ < n)."""

import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from pcexplain.autodiff import (
    Tape,
    Tensor,
    add_bias,
    concat_columns,
    gather_rows,
    group_max_pool,
    matmul,
    max_pool_points,
    relu,
    sub,
)
from pcexplain.networks.base_network import BaseNetwork, NetworkOutput, head_shapes
from pcexplain.networks.sampling import farthest_point_sampling, knn_groups
from pcexplain.pointcloud.cloud import PointCloud
from pcexplain.utils.exceptions import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VariableNetConfig:
    """n // centroid_ratio FPS centroids, groups of ``neighbors`` points.

    Each neighbor enters the local MLP 6→hidden_dim→feature_dim as its offset
    from the centroid followed by its absolute coordinates; the MLP output is
    max-pooled per group. The head is feature_dim→head_dim→C.
    """

    num_classes: int
    feature_dim: int = 64
    hidden_dim: int = 32
    head_dim: int = 32
    centroid_ratio: int = 4
    neighbors: int = 16

    def __post_init__(self):
        for name in (
            "num_classes",
            "feature_dim",
            "hidden_dim",
            "head_dim",
            "centroid_ratio",
            "neighbors",
        ):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.num_classes < 2:
            raise ConfigError(f"a classifier needs at least 2 classes, got {self.num_classes}")
        if self.centroid_ratio < 2:
            raise ConfigError("centroid_ratio must be at least 2 so that n′ < n")

    def num_centroids(self, n: int) -> int:
        """n′ for a cloud of n points."""
        return max(1, n // self.centroid_ratio)


class VariableNet(BaseNetwork):
    """PointNet++-like network: FPS centroids, kNN groups, per-group max pooling."""

    kind = "variable"
    config_type = VariableNetConfig

    @staticmethod
    def parameter_shapes(config: VariableNetConfig) -> Dict[str, Tuple[int, ...]]:
        shapes = {
            "local1.weight": (6, config.hidden_dim),
            "local1.bias": (config.hidden_dim,),
            "local2.weight": (config.hidden_dim, config.feature_dim),
            "local2.bias": (config.feature_dim,),
        }
        shapes.update(head_shapes(config))
        return shapes

    def sample_groups(self, cloud: PointCloud) -> Tuple[np.ndarray, np.ndarray]:
        """Centroid indices and their (n′, k) neighbor groups for the cloud's state.

        Centroids come from alive unexplained points, or from alive points once
        every alive point is explained. Neighbors are drawn from alive points.
        """
        pool = np.flatnonzero(cloud.alive_mask)
        if pool.size == 0:
            pool = np.arange(cloud.n)
        candidates = pool[~cloud.explained_mask[pool]]
        if candidates.size == 0:
            candidates = pool

        count = min(self.config.num_centroids(cloud.n), candidates.size)
        picked = farthest_point_sampling(cloud.points[candidates], count, start=0)
        centroids = candidates[picked]
        k = min(self.config.neighbors, pool.size)
        groups = knn_groups(cloud.points, centroids, pool, k)
        return centroids, groups

    def _forward(
        self,
        tape: Tape,
        cloud: PointCloud,
        points: Tensor,
        params: Dict[str, Tensor],
    ) -> Tuple[Tensor, Dict[str, Tensor], np.ndarray]:
        centroids, groups = self.sample_groups(cloud)
        k = groups.shape[1]
        neighbors = gather_rows(points, groups.reshape(-1))
        offsets = sub(neighbors, gather_rows(points, np.repeat(centroids, k)))
        # [p − c, p] per neighbor
        local = concat_columns(offsets, neighbors)
        hidden = relu(add_bias(matmul(local, params["local1.weight"]), params["local1.bias"]))
        features = relu(add_bias(matmul(hidden, params["local2.weight"]), params["local2.bias"]))
        final, _ = group_max_pool(features, k)
        pooled, _ = max_pool_points(final)
        logits = self._head(pooled, params)
        return logits, {"final": final}, centroids


def variable_forward(
    net: VariableNet, cloud: PointCloud, feature_layer: str = "final"
) -> NetworkOutput:
    """Forward pass of a variable network; association lists the FPS centroids."""
    return net.forward(cloud, feature_layer=feature_layer)
