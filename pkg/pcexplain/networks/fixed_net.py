"""Fixed-size classifier: one feature row per input point (n′ = n)."""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from pcexplain.autodiff import Tape, Tensor, add_bias, matmul, max_pool_points, relu
from pcexplain.networks.base_network import BaseNetwork, NetworkOutput, head_shapes
from pcexplain.pointcloud.cloud import PointCloud
from pcexplain.utils.exceptions import ConfigError


@dataclass(frozen=True)
class FixedNetConfig:
    """Per-point MLP 3→hidden_dim→mid_dim→feature_dim, head feature_dim→head_dim→C."""

    num_classes: int
    feature_dim: int = 64
    hidden_dim: int = 32
    mid_dim: int = 64
    head_dim: int = 32

    def __post_init__(self):
        for name in ("num_classes", "feature_dim", "hidden_dim", "mid_dim", "head_dim"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.num_classes < 2:
            raise ConfigError(f"a classifier needs at least 2 classes, got {self.num_classes}")


class FixedNet(BaseNetwork):
    """PointNet-like network whose final feature layer maps one-to-one onto points."""

    kind = "fixed"
    config_type = FixedNetConfig
    FEATURE_LAYERS = ("final", "hidden")

    @staticmethod
    def parameter_shapes(config: FixedNetConfig) -> Dict[str, Tuple[int, ...]]:
        shapes = {
            "local1.weight": (3, config.hidden_dim),
            "local1.bias": (config.hidden_dim,),
            "local2.weight": (config.hidden_dim, config.mid_dim),
            "local2.bias": (config.mid_dim,),
            "local3.weight": (config.mid_dim, config.feature_dim),
            "local3.bias": (config.feature_dim,),
        }
        shapes.update(head_shapes(config))
        return shapes

    def _forward(
        self,
        tape: Tape,
        cloud: PointCloud,
        points: Tensor,
        params: Dict[str, Tensor],
    ) -> Tuple[Tensor, Dict[str, Tensor], np.ndarray]:
        hidden = relu(add_bias(matmul(points, params["local1.weight"]), params["local1.bias"]))
        mid = relu(add_bias(matmul(hidden, params["local2.weight"]), params["local2.bias"]))
        final = relu(add_bias(matmul(mid, params["local3.weight"]), params["local3.bias"]))
        pooled, _ = max_pool_points(final)
        logits = self._head(pooled, params)
        return logits, {"final": final, "hidden": hidden}, np.arange(cloud.n, dtype=np.int64)


def fixed_forward(net: FixedNet, cloud: PointCloud, feature_layer: str = "final") -> NetworkOutput:
    """Forward pass of a fixed network; association is the identity."""
    return net.forward(cloud, feature_layer=feature_layer)
