"""Mini-batch training with plain gradient descent or Adam."""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Protocol, Tuple

import numpy as np

from pcexplain.autodiff import backward, softmax_cross_entropy
from pcexplain.networks.base_network import BaseNetwork, accuracy
from pcexplain.pointcloud.cloud import PointCloud
from pcexplain.pointcloud.dataset import LabeledDataset
from pcexplain.utils.exceptions import (
    ConfigError,
    ContractError,
    PreconditionError,
    TrainingError,
)

logger = logging.getLogger(__name__)

Parameters = Dict[str, np.ndarray]


@dataclass(frozen=True)
class TrainConfig:
    """Training schedule; every run is deterministic under ``seed``."""

    epochs: int = 30
    batch_size: int = 16
    step_size: float = 1e-3
    seed: int = 0
    optimizer: str = "adam"

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be positive, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be positive, got {self.batch_size}")
        if not self.step_size > 0:
            raise ConfigError(f"step_size must be positive, got {self.step_size}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(
                f"unknown optimizer {self.optimizer!r}; choose from {', '.join(OPTIMIZERS)}"
            )


class EpochMetrics(NamedTuple):
    """Mean loss and accuracy after one epoch."""

    epoch: int
    loss: float
    train_accuracy: float
    test_accuracy: Optional[float]


class Optimizer(Protocol):
    """One update of every parameter from its gradient."""

    def step(self, params: Parameters, grads: Parameters) -> Parameters: ...


class GradientDescent:
    """θ ← θ − η·g."""

    def __init__(self, step_size: float):
        self.step_size = step_size

    def step(self, params: Parameters, grads: Parameters) -> Parameters:
        return {name: value - self.step_size * grads[name] for name, value in params.items()}


@dataclass
class Adam:
    """Adaptive moment estimation with bias correction."""

    step_size: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    _first: Parameters = field(default_factory=dict)
    _second: Parameters = field(default_factory=dict)
    _count: int = 0

    def step(self, params: Parameters, grads: Parameters) -> Parameters:
        self._count += 1
        updated = {}
        for name, value in params.items():
            grad = grads[name]
            first = self.beta1 * self._first.get(name, 0.0) + (1 - self.beta1) * grad
            second = self.beta2 * self._second.get(name, 0.0) + (1 - self.beta2) * grad**2
            self._first[name], self._second[name] = first, second
            first_hat = first / (1 - self.beta1**self._count)
            second_hat = second / (1 - self.beta2**self._count)
            updated[name] = value - self.step_size * first_hat / (np.sqrt(second_hat) + self.eps)
        return updated


OPTIMIZERS: Dict[str, Callable[[float], Optimizer]] = {
    "sgd": GradientDescent,
    "adam": Adam,
}


@dataclass(frozen=True, eq=False)
class TrainResult:
    """Trained network plus one metrics row per epoch."""

    network: BaseNetwork
    metrics: List[EpochMetrics]


def loss_and_gradients(net: BaseNetwork, cloud: PointCloud) -> Tuple[float, int, Parameters]:
    """Cross-entropy loss, predicted class and parameter gradients for one cloud."""
    if cloud.label is None:
        raise ContractError("training clouds need a label")
    output = net.forward(cloud, track_params=True)
    loss = softmax_cross_entropy(output.logits, cloud.label)
    store = backward(output.tape, loss)
    grads = {name: store[tensor] for name, tensor in output.parameters.items()}
    return loss.item(), int(np.argmax(output.logits.values)), grads


def train(
    net: BaseNetwork,
    dataset: LabeledDataset,
    cfg: TrainConfig,
    on_epoch: Optional[Callable[[EpochMetrics], None]] = None,
) -> TrainResult:
    """Minimize mean softmax cross-entropy over the training split.

    The input network is left untouched; the trained one is returned.
    """
    train_clouds = dataset.train_clouds
    if not train_clouds:
        raise PreconditionError("the dataset has no training clouds")
    if net.num_classes != dataset.num_classes:
        raise ContractError(
            f"network predicts {net.num_classes} classes, dataset has {dataset.num_classes}"
        )

    rng = np.random.default_rng(cfg.seed)
    optimizer: Optimizer = OPTIMIZERS[cfg.optimizer](cfg.step_size)
    params = {name: value.copy() for name, value in net.parameters.items()}
    current = net
    metrics: List[EpochMetrics] = []

    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(train_clouds))
        total_loss = 0.0
        correct = 0
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            summed = {name: np.zeros_like(value) for name, value in params.items()}
            for index in batch:
                cloud = train_clouds[index]
                loss, predicted, grads = loss_and_gradients(current, cloud)
                if not np.isfinite(loss):
                    raise TrainingError("loss is not finite", epoch=epoch)
                total_loss += loss
                correct += int(predicted == cloud.label)
                for name, grad in grads.items():
                    summed[name] += grad
            mean_grads = {name: grad / len(batch) for name, grad in summed.items()}
            params = optimizer.step(params, mean_grads)
            if not all(np.all(np.isfinite(value)) for value in params.values()):
                raise TrainingError("parameters diverged", epoch=epoch)
            current = net.with_parameters(params)

        row = EpochMetrics(
            epoch=epoch,
            loss=total_loss / len(train_clouds),
            train_accuracy=correct / len(train_clouds),
            test_accuracy=accuracy(current, dataset.test_clouds),
        )
        metrics.append(row)
        logger.info(
            "Epoch %d/%d: loss %.6f, train accuracy %.4f",
            epoch,
            cfg.epochs,
            row.loss,
            row.train_accuracy,
            extra={"tag": "epoch", **row._asdict()},
        )
        if on_epoch is not None:
            on_epoch(row)

    return TrainResult(current, metrics)
