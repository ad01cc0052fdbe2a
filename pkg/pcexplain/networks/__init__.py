"""Fixed and variable point-cloud classifiers, training and checkpoints."""

from pcexplain.networks.base_network import (
    BaseNetwork,
    NetworkOutput,
    Prediction,
    accuracy,
    class_probabilities,
    predict,
)
from pcexplain.networks.checkpoint import NETWORK_KINDS, load_model, save_model
from pcexplain.networks.fixed_net import FixedNet, FixedNetConfig, fixed_forward
from pcexplain.networks.sampling import farthest_point_sampling, knn_groups
from pcexplain.networks.training import (
    OPTIMIZERS,
    Adam,
    EpochMetrics,
    GradientDescent,
    TrainConfig,
    TrainResult,
    loss_and_gradients,
    train,
)
from pcexplain.networks.variable_net import VariableNet, VariableNetConfig, variable_forward

__all__ = [
    "Adam",
    "BaseNetwork",
    "EpochMetrics",
    "FixedNet",
    "FixedNetConfig",
    "GradientDescent",
    "NETWORK_KINDS",
    "NetworkOutput",
    "OPTIMIZERS",
    "Prediction",
    "TrainConfig",
    "TrainResult",
    "VariableNet",
    "VariableNetConfig",
    "accuracy",
    "class_probabilities",
    "farthest_point_sampling",
    "fixed_forward",
    "knn_groups",
    "load_model",
    "loss_and_gradients",
    "predict",
    "save_model",
    "train",
    "variable_forward",
]
