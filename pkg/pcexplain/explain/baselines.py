"""Comparison methods: loss-gradient saliency, radial point shifting and random."""

import logging
import zlib
from typing import Any, Dict, Optional

import numpy as np

from pcexplain.autodiff import backward, softmax_cross_entropy
from pcexplain.explain.base_explainer import BaseExplainer, ExplanationResult, resolve_target
from pcexplain.networks.base_network import BaseNetwork
from pcexplain.pointcloud.cloud import Heatmap, PointCloud
from pcexplain.utils.exceptions import ConfigError

logger = logging.getLogger(__name__)


def point_gradients(net: BaseNetwork, cloud: PointCloud, target: int) -> np.ndarray:
    """∂ cross-entropy(target)/∂P, shape n×3."""
    output = net.forward(cloud)
    loss = softmax_cross_entropy(output.logits, target)
    return backward(output.tape, loss)[output.points]


def gradients_baseline(net: BaseNetwork, cloud: PointCloud, target: int) -> Heatmap:
    """Per-point Euclidean norm of the loss gradient, min-max normalized."""
    grads = point_gradients(net, cloud, target)
    return Heatmap.from_raw(np.linalg.norm(grads, axis=1))


def pcsn_scores(
    net: BaseNetwork, cloud: PointCloud, target: int, radius_power: float = 0.0
) -> np.ndarray:
    """Raw max(0, −(Pᵢ − median)·∂loss/∂Pᵢ), times ‖Pᵢ − median‖^radius_power."""
    grads = point_gradients(net, cloud, target)
    radial = cloud.points - np.median(cloud.points, axis=0)
    scores = np.maximum(0.0, -np.sum(radial * grads, axis=1))
    if radius_power:
        scores = scores * np.linalg.norm(radial, axis=1) ** radius_power
    return scores


def pcsn_baseline(
    net: BaseNetwork, cloud: PointCloud, target: int, radius_power: float = 0.0
) -> Heatmap:
    """Loss increase from shifting each point toward the median, min-max normalized."""
    return Heatmap.from_raw(pcsn_scores(net, cloud, target, radius_power))


def random_heatmap(cloud: PointCloud, seed: int = 0) -> Heatmap:
    """Uniform random relevance; seeded by ``seed`` and the cloud's coordinates."""
    rng = np.random.default_rng([seed, zlib.crc32(cloud.points.tobytes())])
    return Heatmap.from_raw(rng.uniform(size=cloud.n))


class GradientsExplainer(BaseExplainer):
    """Loss-gradient saliency per point."""

    name = "gradients"

    def explain(self, net: BaseNetwork, cloud: PointCloud) -> ExplanationResult:
        target, predicted = resolve_target(net, cloud, self.target)
        return ExplanationResult(
            method=self.name,
            heatmap=gradients_baseline(net, cloud, target),
            target_class=target,
            predicted_class=predicted,
        )


class PcSNExplainer(BaseExplainer):
    """Radial point-shifting surrogate."""

    name = "pcsn"

    def __init__(self, target: Optional[int] = None, radius_power: float = 0.0) -> None:
        super().__init__(target)
        if radius_power < 0:
            raise ConfigError(f"radius_power must be non-negative, got {radius_power}")
        self.radius_power = radius_power

    def get_config(self) -> Dict[str, Any]:
        return {"target": self.target, "radius_power": self.radius_power}

    def explain(self, net: BaseNetwork, cloud: PointCloud) -> ExplanationResult:
        target, predicted = resolve_target(net, cloud, self.target)
        return ExplanationResult(
            method=self.name,
            heatmap=pcsn_baseline(net, cloud, target, self.radius_power),
            target_class=target,
            predicted_class=predicted,
        )


class RandomExplainer(BaseExplainer):
    """Random relevance, the control for point-dropping curves."""

    name = "random"

    def __init__(self, target: Optional[int] = None, seed: int = 0) -> None:
        super().__init__(target)
        self.seed = seed

    def get_config(self) -> Dict[str, Any]:
        return {"target": self.target, "seed": self.seed}

    def explain(self, net: BaseNetwork, cloud: PointCloud) -> ExplanationResult:
        target, predicted = resolve_target(net, cloud, self.target)
        return ExplanationResult(
            method=self.name,
            heatmap=random_heatmap(cloud, self.seed),
            target_class=target,
            predicted_class=predicted,
        )
