"""Common interface of the explanation methods."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from pcexplain.networks.base_network import BaseNetwork
from pcexplain.pointcloud.cloud import Heatmap, PointCloud
from pcexplain.utils.exceptions import ClassIndexError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ExplanationResult:
    """Heatmap of one cloud plus what produced it.

    ``iteration_heatmaps`` holds the per-iteration heatmaps of methods that
    build the final one in stages; it is empty otherwise.
    """

    method: str
    heatmap: Heatmap
    target_class: int
    predicted_class: int
    metadata: Dict[str, Any] = field(default_factory=dict)
    iteration_heatmaps: Tuple[Heatmap, ...] = ()


def resolve_target(
    net: BaseNetwork, cloud: PointCloud, target: Optional[int] = None
) -> Tuple[int, int]:
    """(target class, predicted class); the target defaults to the prediction."""
    predicted = net.predict(cloud).label
    if target is None:
        return predicted, predicted
    if not 0 <= target < net.num_classes:
        raise ClassIndexError(f"target class {target} outside [0, {net.num_classes})")
    return int(target), predicted


class BaseExplainer(ABC):
    """
    Base class for a method that assigns a relevance heatmap to a cloud.
    """

    name: str = ""

    def __init__(self, target: Optional[int] = None) -> None:
        """
        Args:
            target (Optional[int]): Class to explain; None explains the predicted class.
        """
        self.target = target

    @abstractmethod
    def explain(self, net: BaseNetwork, cloud: PointCloud) -> ExplanationResult:
        """Heatmap for one cloud under a trained network."""

    def get_config(self) -> Dict[str, Any]:
        """Settings recorded next to every heatmap."""
        return {"target": self.target}

    def log_summary(self) -> None:
        """Logs a summary of the explainer configuration."""
        logger.info("----------------------------------------------------")
        logger.info("--------- EXPLAINER CONFIGURATION SUMMARY ---------")
        logger.info("EXPLAINER NAME: %s", self.__class__.__name__)
        logger.info("METHOD: %s", self.name)
        for key, value in self.get_config().items():
            logger.info("%s: %s", key.upper(), value)
        logger.info("----------------------------------------------------")
