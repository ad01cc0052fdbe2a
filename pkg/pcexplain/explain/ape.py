"""Iterative heatmap explanation of point-cloud classifiers.

An initial heatmap is built from partial heatmaps: the target-class gradients
of the final feature maps are averaged per map into weights α, the α-weighted
sum of the maps is rectified, and the values attach to the points associated
with the feature rows. Explained points are dropped and the pass repeats until
every point has a value. The outer loop then drops the least relevant points,
computes another initial heatmap on what remains, and merges all of them with
a weighted maximum.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from pcexplain.autodiff import as_tensor, backward, global_avg_pool, matmul, relu, take
from pcexplain.explain.base_explainer import BaseExplainer, ExplanationResult, resolve_target
from pcexplain.networks.base_network import BaseNetwork, NetworkOutput
from pcexplain.pointcloud.cloud import (
    Heatmap,
    PointCloud,
    drop_points,
    mark_explained,
    minmax_normalize,
    rank_points,
)
from pcexplain.utils.exceptions import ConfigError, ContractError, PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class APEConfig:
    """Outer-loop settings.

    Attributes:
        iterations: Number of initial heatmaps λ.
        drop_count: Points dropped after each initial heatmap; None means floor(n/λ).
        weights: Merge weight per initial heatmap; None means all 1.
        target: Class to explain; None explains the predicted class.
        feature_layer: Network layer whose maps are weighted.
    """

    iterations: int = 4
    drop_count: Optional[int] = None
    weights: Optional[Tuple[float, ...]] = None
    target: Optional[int] = None
    feature_layer: str = "final"

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError(f"iterations must be at least 1, got {self.iterations}")
        if self.drop_count is not None and self.drop_count < 0:
            raise ConfigError(f"drop_count must be non-negative, got {self.drop_count}")
        if self.weights is not None:
            weights = tuple(float(w) for w in self.weights)
            if len(weights) != self.iterations:
                raise ConfigError(
                    f"{len(weights)} merge weights given for {self.iterations} iterations"
                )
            if not all(w > 0 and np.isfinite(w) for w in weights):
                raise ConfigError(f"merge weights must be positive, got {weights}")
            object.__setattr__(self, "weights", weights)
        if self.target is not None and self.target < 0:
            raise ConfigError(f"target class must be non-negative, got {self.target}")

    def resolved_drop_count(self, n: int) -> int:
        """Points dropped per outer iteration for a cloud of n points."""
        return n // self.iterations if self.drop_count is None else self.drop_count

    def resolved_weights(self) -> Tuple[float, ...]:
        """Merge weights, one per iteration."""
        return self.weights if self.weights is not None else (1.0,) * self.iterations

    @property
    def target_policy(self) -> str:
        """Either "predicted" or "fixed"."""
        return "predicted" if self.target is None else "fixed"


@dataclass(frozen=True, eq=False)
class PartialHeatmap:
    """Raw rectified values for the points one inner iteration explains."""

    neuron_values: np.ndarray
    explained_indices: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.neuron_values, dtype=np.float64)
        indices = np.asarray(self.explained_indices, dtype=np.int64)
        if values.shape != indices.shape or values.ndim != 1:
            raise ContractError(
                f"{values.shape[0]} partial values for {indices.shape[0]} point indices"
            )
        if np.unique(indices).size != indices.size:
            raise ContractError("partial heatmap point indices must be distinct")
        if values.size and values.min() < 0:
            raise ContractError("partial heatmap values must be non-negative")
        object.__setattr__(self, "neuron_values", values)
        object.__setattr__(self, "explained_indices", indices)

    @property
    def size(self) -> int:
        """Number of points covered."""
        return int(self.explained_indices.size)

    def restricted(self, allowed_points: np.ndarray) -> "PartialHeatmap":
        """Keep only entries whose point is allowed by a boolean point mask."""
        keep = np.asarray(allowed_points, dtype=bool)[self.explained_indices]
        return PartialHeatmap(self.neuron_values[keep], self.explained_indices[keep])


@dataclass(frozen=True, eq=False)
class InitialHeatmapResult:
    """Normalized initial heatmap with its inner-loop trace."""

    heatmap: Heatmap
    raw_values: np.ndarray
    partials: Tuple[PartialHeatmap, ...]
    warnings: Tuple[str, ...] = ()

    @property
    def iterations(self) -> int:
        """Inner iteration count m."""
        return len(self.partials)


@dataclass(frozen=True, eq=False)
class APEResult:
    """Merged heatmap and per-iteration diagnostics."""

    heatmap: Heatmap
    target_class: int
    predicted_class: int
    initial_heatmaps: Tuple[Heatmap, ...]
    inner_iterations: Tuple[int, ...]
    dropped_fractions: Tuple[float, ...]
    drop_count: int
    weights: Tuple[float, ...]
    undropped_points: int
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    def metadata(self) -> Dict[str, Any]:
        """JSON-ready diagnostics."""
        return {
            "m": self.inner_iterations[0],
            "inner_iterations": list(self.inner_iterations),
            "lambda": len(self.initial_heatmaps),
            "drop_count": self.drop_count,
            "weights": list(self.weights),
            "dropped_fractions": list(self.dropped_fractions),
            "undropped_points": self.undropped_points,
            "warnings": list(self.warnings),
        }


def _target_pass(
    net: BaseNetwork, cloud: PointCloud, target: int, feature_layer: str
) -> Tuple[NetworkOutput, np.ndarray]:
    output = net.forward(cloud, feature_layer=feature_layer)
    score = take(output.logits, target)
    return output, backward(output.tape, score)[output.feature_maps]


def feature_gradients(
    net: BaseNetwork, cloud: PointCloud, target: int, feature_layer: str = "final"
) -> np.ndarray:
    """∂(pre-softmax logit of ``target``)/∂A, shape n′×K."""
    return _target_pass(net, cloud, target, feature_layer)[1]


def gap_weights(grads) -> np.ndarray:
    """Global average of the gradients over the n′ rows, one weight per map."""
    return global_avg_pool(as_tensor(grads)).values


def partial_heatmap(feature_maps, alpha, association) -> PartialHeatmap:
    """max(0, Σ_k α_k·A[:, k]) attached to the associated points, unnormalized."""
    maps = np.asarray(feature_maps, dtype=np.float64)
    weights = np.asarray(alpha, dtype=np.float64)
    points = np.asarray(association, dtype=np.int64)
    if maps.ndim != 2 or points.shape != (maps.shape[0],):
        raise ContractError(
            f"association has {points.shape[0]} entries for {maps.shape[0]} feature rows"
        )
    if weights.shape != (maps.shape[1],):
        raise ContractError(f"{weights.shape[0]} weights for {maps.shape[1]} feature maps")
    values = relu(matmul(maps, weights.reshape(-1, 1))).values[:, 0]
    return PartialHeatmap(values, points)


def compute_initial_heatmap(
    net: BaseNetwork, cloud: PointCloud, target: int, feature_layer: str = "final"
) -> InitialHeatmapResult:
    """Inner loop: explain, drop explained points, repeat until every point has a value.

    Points already dropped in ``cloud`` count as explained with value 0.
    """
    explained = cloud.explained_mask | ~cloud.alive_mask
    if explained.all():
        raise PreconditionError("the cloud has no unexplained alive point")
    work = mark_explained(cloud, np.flatnonzero(explained))
    raw = np.zeros(cloud.n)
    partials: List[PartialHeatmap] = []
    warnings: List[str] = []

    while not work.explained_mask.all():
        output, grads = _target_pass(net, work, target, feature_layer)
        partial = partial_heatmap(
            output.feature_maps.values, gap_weights(grads), output.association
        ).restricted(~work.explained_mask)
        if partial.size == 0:
            remaining = int(np.count_nonzero(~work.explained_mask))
            message = (
                f"inner iteration {len(partials) + 1} explained no new point; "
                f"{remaining} points keep value 0"
            )
            logger.warning(message, extra={"tag": "zero_progress", "remaining": remaining})
            warnings.append(message)
            break
        raw[partial.explained_indices] = partial.neuron_values
        partials.append(partial)
        work = drop_points(
            mark_explained(work, partial.explained_indices), partial.explained_indices
        )

    logger.debug(
        "Initial heatmap finished after %d inner iterations",
        len(partials),
        extra={"tag": "inner_loop", "m": len(partials)},
    )
    return InitialHeatmapResult(
        heatmap=Heatmap.from_raw(raw),
        raw_values=raw,
        partials=tuple(partials),
        warnings=tuple(warnings),
    )


def initial_heatmap(
    net: BaseNetwork, cloud: PointCloud, target: int, feature_layer: str = "final"
) -> Heatmap:
    """Heatmap of one inner loop, normalized once over all partial values."""
    return compute_initial_heatmap(net, cloud, target, feature_layer).heatmap


def merge_heatmaps(heatmaps, weights) -> Heatmap:
    """Pointwise max of w_i·𝓛_i, renormalized when some weight differs from 1."""
    stacked = np.stack([w * h.values for w, h in zip(weights, heatmaps)])
    merged = stacked.max(axis=0)
    if any(w != 1.0 for w in weights):
        merged = minmax_normalize(merged)
    return Heatmap(merged)


def run_ape(net: BaseNetwork, cloud: PointCloud, cfg: APEConfig) -> APEResult:
    """Outer loop over λ initial heatmaps with low-relevance dropping in between."""
    target, predicted = resolve_target(net, cloud, cfg.target)
    drop_count = cfg.resolved_drop_count(cloud.n)
    weights = cfg.resolved_weights()
    current = replace(cloud, explained_mask=np.zeros(cloud.n, dtype=bool))

    heatmaps: List[Heatmap] = []
    inner: List[int] = []
    fractions: List[float] = []
    warnings: List[str] = []
    for iteration in range(1, cfg.iterations + 1):
        alive = np.flatnonzero(current.alive_mask)
        fractions.append(1.0 - alive.size / cloud.n)
        if alive.size:
            result = compute_initial_heatmap(net, current, target, cfg.feature_layer)
            heatmaps.append(result.heatmap)
            inner.append(result.iterations)
            warnings.extend(result.warnings)
        else:
            message = f"iteration {iteration}: every point is already dropped"
            logger.warning(message, extra={"tag": "outer_loop", "iteration": iteration})
            warnings.append(message)
            heatmaps.append(Heatmap(np.zeros(cloud.n)))
            inner.append(0)

        lowest = rank_points(heatmaps[-1].values, descending=False, candidates=alive)
        current = drop_points(current, lowest[:drop_count])
        logger.debug(
            "Outer iteration %d: m=%d, dropped %d of %d alive points",
            iteration,
            inner[-1],
            min(drop_count, alive.size),
            alive.size,
            extra={"tag": "outer_loop", "iteration": iteration, "m": inner[-1]},
        )

    undropped = int(np.count_nonzero(current.alive_mask))
    if undropped:
        message = (
            f"{undropped} points were never dropped "
            f"(λ·n_L = {cfg.iterations * drop_count} < n = {cloud.n})"
        )
        logger.warning(message, extra={"tag": "undropped", "undropped": undropped})
        warnings.append(message)
    return APEResult(
        heatmap=merge_heatmaps(heatmaps, weights),
        target_class=target,
        predicted_class=predicted,
        initial_heatmaps=tuple(heatmaps),
        inner_iterations=tuple(inner),
        dropped_fractions=tuple(fractions),
        drop_count=drop_count,
        weights=weights,
        undropped_points=undropped,
        warnings=tuple(warnings),
    )


def ape_explain(net: BaseNetwork, cloud: PointCloud, cfg: Optional[APEConfig] = None) -> Heatmap:
    """Merged heatmap of a cloud."""
    return run_ape(net, cloud, cfg or APEConfig()).heatmap


class APEExplainer(BaseExplainer):
    """Explainer wrapping the iterative heatmap algorithm."""

    name = "ape"

    def __init__(self, config: Optional[APEConfig] = None) -> None:
        self.config = config or APEConfig()
        super().__init__(self.config.target)

    def get_config(self) -> Dict[str, Any]:
        return {
            "iterations": self.config.iterations,
            "drop_count": self.config.drop_count,
            "weights": None if self.config.weights is None else list(self.config.weights),
            "target": self.config.target,
            "target_policy": self.config.target_policy,
            "feature_layer": self.config.feature_layer,
        }

    def explain(self, net: BaseNetwork, cloud: PointCloud) -> ExplanationResult:
        result = run_ape(net, cloud, self.config)
        return ExplanationResult(
            method=self.name,
            heatmap=result.heatmap,
            target_class=result.target_class,
            predicted_class=result.predicted_class,
            metadata=result.metadata(),
            iteration_heatmaps=result.initial_heatmaps,
        )
