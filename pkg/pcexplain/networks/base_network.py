"""Shared structure of the point-cloud classifiers."""

import logging
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass
from typing import Any, Dict, NamedTuple, Optional, Tuple, Type

import numpy as np

from pcexplain.autodiff import Tape, Tensor, add_bias, matmul, relu, stable_softmax
from pcexplain.pointcloud.cloud import PointCloud
from pcexplain.utils.exceptions import ConfigError, ContractError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NetworkOutput:
    """Result of one recorded forward pass.

    ``feature_maps`` is the selected n′×K layer A, and ``association[i]`` is the
    input point that row i of A stands for. ``points`` and ``parameters`` are
    the tape leaves, so gradients with respect to them can be read after
    backward.
    """

    logits: Tensor
    feature_maps: Tensor
    association: np.ndarray
    points: Tensor
    parameters: Dict[str, Tensor]
    tape: Tape

    def __post_init__(self):
        rows = self.feature_maps.shape[0]
        if self.association.shape != (rows,):
            raise ContractError(
                f"association has {self.association.shape[0]} entries for {rows} feature rows"
            )


class Prediction(NamedTuple):
    """Predicted class (lowest index on ties) and softmax probabilities."""

    label: int
    probabilities: np.ndarray


def class_probabilities(logits) -> Prediction:
    """Softmax of the logits and their argmax."""
    probabilities = stable_softmax(np.asarray(logits, dtype=np.float64))
    return Prediction(int(np.argmax(probabilities)), probabilities)


class BaseNetwork(ABC):
    """Base class for a classifier whose final feature layer can be explained."""

    kind: str = ""
    config_type: Type[Any] = object
    FEATURE_LAYERS: Tuple[str, ...] = ("final",)

    def __init__(self, config, parameters: Dict[str, np.ndarray]):
        self.config = config
        shapes = self.parameter_shapes(config)
        if set(parameters) != set(shapes):
            raise ContractError(
                f"{self.kind} parameters {sorted(parameters)} do not match {sorted(shapes)}"
            )
        frozen = {}
        for name, shape in shapes.items():
            value = np.array(parameters[name], dtype=np.float64)
            if value.shape != shape:
                raise ContractError(f"parameter {name} has shape {value.shape}, expected {shape}")
            if not np.all(np.isfinite(value)):
                raise ContractError(f"parameter {name} is not finite")
            value.setflags(write=False)
            frozen[name] = value
        self._parameters = frozen

    @staticmethod
    @abstractmethod
    def parameter_shapes(config) -> Dict[str, Tuple[int, ...]]:
        """Ordered parameter names and shapes for a config."""

    @abstractmethod
    def _forward(
        self,
        tape: Tape,
        cloud: PointCloud,
        points: Tensor,
        params: Dict[str, Tensor],
    ) -> Tuple[Tensor, Dict[str, Tensor], np.ndarray]:
        """Return logits, the explainable feature layers and the association."""

    @classmethod
    def initialize(cls, config, seed: int) -> "BaseNetwork":
        """He-initialized weights and zero biases, deterministic under seed."""
        rng = np.random.default_rng(seed)
        params = {}
        for name, shape in cls.parameter_shapes(config).items():
            if name.endswith(".weight"):
                params[name] = rng.normal(0.0, np.sqrt(2.0 / shape[0]), size=shape)
            else:
                params[name] = np.zeros(shape)
        return cls(config, params)

    @property
    def parameters(self) -> Dict[str, np.ndarray]:
        """Read-only parameter arrays in manifest order."""
        return dict(self._parameters)

    @property
    def num_classes(self) -> int:
        """Number of output classes."""
        return self.config.num_classes

    def with_parameters(self, parameters: Dict[str, np.ndarray]) -> "BaseNetwork":
        """Same architecture with different parameters."""
        return type(self)(self.config, parameters)

    def forward(
        self,
        cloud: PointCloud,
        track_params: bool = False,
        feature_layer: str = "final",
    ) -> NetworkOutput:
        """Run a recorded forward pass on a fresh tape."""
        if feature_layer not in self.FEATURE_LAYERS:
            raise ConfigError(
                f"{self.kind} network has no feature layer {feature_layer!r}; "
                f"choose from {', '.join(self.FEATURE_LAYERS)}"
            )
        tape = Tape()
        points = tape.leaf(cloud.points, requires_grad=True)
        params = {
            name: tape.leaf(value, requires_grad=track_params)
            for name, value in self._parameters.items()
        }
        logits, layers, association = self._forward(tape, cloud, points, params)
        return NetworkOutput(
            logits=logits,
            feature_maps=layers[feature_layer],
            association=association,
            points=points,
            parameters=params,
            tape=tape,
        )

    def _head(self, pooled: Tensor, params: Dict[str, Tensor]) -> Tensor:
        hidden = relu(add_bias(matmul(pooled, params["head1.weight"]), params["head1.bias"]))
        return add_bias(matmul(hidden, params["head2.weight"]), params["head2.bias"])

    def predict(self, cloud: PointCloud) -> Prediction:
        """Predicted class and probabilities for one cloud."""
        return class_probabilities(self.forward(cloud).logits.values)

    def log_summary(self) -> None:
        """Log the architecture configuration."""
        logger.info("----------------------------------------------------")
        logger.info("--------- NETWORK CONFIGURATION SUMMARY ---------")
        logger.info("ARCHITECTURE: %s", self.kind)
        for key, value in asdict(self.config).items():
            logger.info("%s: %s", key.upper(), value)
        logger.info(
            "# OF PARAMETERS: %d", sum(p.size for p in self._parameters.values())
        )
        logger.info("----------------------------------------------------")


def head_shapes(config) -> Dict[str, Tuple[int, ...]]:
    """Shapes of the K→head_dim→C classifier head."""
    return {
        "head1.weight": (config.feature_dim, config.head_dim),
        "head1.bias": (config.head_dim,),
        "head2.weight": (config.head_dim, config.num_classes),
        "head2.bias": (config.num_classes,),
    }


def predict(net: BaseNetwork, cloud: PointCloud) -> Prediction:
    """Argmax of softmax(logits), ties to the lowest class index."""
    return net.predict(cloud)


def accuracy(net: BaseNetwork, clouds) -> Optional[float]:
    """Share of labeled clouds classified correctly; None for no clouds."""
    clouds = list(clouds)
    if not clouds:
        return None
    correct = sum(int(net.predict(cloud).label == cloud.label) for cloud in clouds)
    return correct / len(clouds)
