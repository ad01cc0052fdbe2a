"""Point-dropping curves and their area under the curve."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from pcexplain.networks.base_network import BaseNetwork
from pcexplain.pointcloud.cloud import Heatmap, PointCloud, drop_points, rank_points
from pcexplain.utils.exceptions import ConfigError, ContractError, PreconditionError

logger = logging.getLogger(__name__)

HIGH_DROP = "high_drop"
LOW_DROP = "low_drop"
DROP_MODES = (HIGH_DROP, LOW_DROP)
DEFAULT_STEPS = 11


@dataclass(frozen=True)
class PDCCurve:
    """Accuracy against the fraction of points dropped in relevance order."""

    fractions: Tuple[float, ...]
    accuracies: Tuple[float, ...]
    mode: str
    method: str = ""

    def __post_init__(self):
        if self.mode not in DROP_MODES:
            raise ConfigError(f"unknown drop mode {self.mode!r}; choose from {', '.join(DROP_MODES)}")
        fractions = tuple(float(f) for f in self.fractions)
        accuracies = tuple(float(a) for a in self.accuracies)
        if len(fractions) != len(accuracies):
            raise ContractError(f"{len(fractions)} fractions for {len(accuracies)} accuracies")
        if fractions and (fractions[0] != 0.0 or fractions[-1] > 1.0):
            raise ContractError("fractions must start at 0 and stay within [0, 1]")
        if any(b <= a for a, b in zip(fractions, fractions[1:])):
            raise ContractError("fractions must be strictly increasing")
        if any(not 0.0 <= a <= 1.0 for a in accuracies):
            raise ContractError("accuracies must lie in [0, 1]")
        object.__setattr__(self, "fractions", fractions)
        object.__setattr__(self, "accuracies", accuracies)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready curve with its AUC."""
        return {
            "method": self.method,
            "mode": self.mode,
            "fractions": list(self.fractions),
            "accuracies": list(self.accuracies),
            "auc": auc(self),
        }


def drop_schedule(n: int, steps: int) -> np.ndarray:
    """Points dropped at each of ``steps`` evenly spaced fractions: floor(f·n)."""
    if steps < 2:
        raise PreconditionError(f"a point-dropping curve needs at least 2 steps, got {steps}")
    return (np.arange(steps) * n) // (steps - 1)


def drop_outcomes(
    net: BaseNetwork, cloud: PointCloud, heatmap: Heatmap, mode: str, steps: int
) -> np.ndarray:
    """Whether the cloud is still classified correctly at each drop fraction."""
    heatmap.check_aligned(cloud)
    if cloud.label is None:
        raise ContractError("point-dropping curves need labeled clouds")
    base = cloud.fresh()
    order = rank_points(heatmap.values, descending=mode == HIGH_DROP)
    outcomes = np.zeros(steps, dtype=bool)
    for step, count in enumerate(drop_schedule(cloud.n, steps)):
        dropped = drop_points(base, order[:count])
        outcomes[step] = net.predict(dropped).label == cloud.label
    return outcomes


def point_drop_curve(
    net: BaseNetwork,
    clouds: Sequence[PointCloud],
    heatmaps: Sequence[Heatmap],
    mode: str,
    steps: int = DEFAULT_STEPS,
    method: str = "",
) -> PDCCurve:
    """Mean accuracy as each cloud loses its top (high_drop) or bottom (low_drop) points.

    The heatmaps are fixed beforehand and never recomputed while dropping.
    """
    if mode not in DROP_MODES:
        raise ConfigError(f"unknown drop mode {mode!r}; choose from {', '.join(DROP_MODES)}")
    if not clouds:
        raise PreconditionError("no clouds to evaluate")
    if len(heatmaps) != len(clouds) or any(h is None for h in heatmaps):
        raise ContractError(f"{len(heatmaps)} heatmaps for {len(clouds)} clouds")
    if steps < 2:
        raise PreconditionError(f"a point-dropping curve needs at least 2 steps, got {steps}")
    fractions = np.linspace(0.0, 1.0, steps)

    correct = np.zeros(steps)
    for cloud, heatmap in zip(clouds, heatmaps):
        correct += drop_outcomes(net, cloud, heatmap, mode, steps)
    curve = PDCCurve(
        fractions=tuple(fractions),
        accuracies=tuple(correct / len(clouds)),
        mode=mode,
        method=method,
    )
    logger.debug(
        "%s %s curve: AUC %.4f",
        method,
        mode,
        auc(curve),
        extra={"tag": "pdc", "method": method, "mode": mode},
    )
    return curve


def auc(curve: PDCCurve) -> float:
    """Trapezoidal area under the curve divided by the fraction span."""
    if len(curve.fractions) < 2:
        raise PreconditionError("AUC needs at least 2 samples")
    fractions = np.asarray(curve.fractions)
    area = np.trapezoid(np.asarray(curve.accuracies), fractions)
    return float(np.clip(area / (fractions[-1] - fractions[0]), 0.0, 1.0))
