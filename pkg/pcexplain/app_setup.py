"""This module contains the functions to set up logging, networks and explainers from a run configuration."""

import dataclasses
import logging
from logging.config import dictConfig
from typing import Any, Mapping

from pcexplain.explain import EXPLAINERS, APEConfig, BaseExplainer
from pcexplain.logfiles.logging_config import LEVEL_COLORS, get_log_config
from pcexplain.networks import NETWORK_KINDS, BaseNetwork, TrainConfig
from pcexplain.utils.exceptions import ConfigError

logger = logging.getLogger(__name__)


# Setup Logging
def setup_logging(config: Mapping[str, Any]) -> None:
    """Setup the logging configuration based on the specified configuration."""
    dictConfig(get_log_config(config))


original_log_record_factory = logging.getLogRecordFactory()


def record_factory(*args, **kwargs):
    """Factory function for creating log records."""
    record = original_log_record_factory(*args, **kwargs)
    record.level_color = LEVEL_COLORS[min(record.levelno // 10, len(LEVEL_COLORS) - 1)]
    record.end_color = "\033[0m"
    return record


def _fields_from(config_type, config: Mapping[str, Any]) -> dict:
    names = {field.name for field in dataclasses.fields(config_type)}
    return {key: value for key, value in config.items() if key in names}


# Setup Network
def build_network(kind: str, num_classes: int, config: Mapping[str, Any]) -> BaseNetwork:
    """Freshly initialized network of the given kind, seeded by config['seed']."""
    network_class = NETWORK_KINDS.get(kind)
    if network_class is None:
        raise ConfigError(f"unknown network {kind!r}; choose from {', '.join(NETWORK_KINDS)}")
    settings = _fields_from(network_class.config_type, config)
    settings["num_classes"] = num_classes
    return network_class.initialize(network_class.config_type(**settings), config.get("seed", 0))


def build_train_config(config: Mapping[str, Any]) -> TrainConfig:
    """Training schedule from a run configuration."""
    return TrainConfig(**_fields_from(TrainConfig, config))


def build_ape_config(config: Mapping[str, Any]) -> APEConfig:
    """APE settings from a run configuration."""
    weights = config.get("weights")
    return APEConfig(
        iterations=config.get("iterations", 4),
        drop_count=config.get("drop_count"),
        weights=None if weights is None else tuple(weights),
        target=config.get("target"),
        feature_layer=config.get("feature_layer", "final"),
    )


# Setup Explainer
def build_explainer(method: str, config: Mapping[str, Any]) -> BaseExplainer:
    """Explainer for a method name, configured from a run configuration."""
    if method not in EXPLAINERS:
        raise ConfigError(f"unknown method {method!r}; choose from {', '.join(EXPLAINERS)}")
    target = config.get("target")
    if method == "ape":
        explainer = EXPLAINERS[method](build_ape_config(config))
    elif method == "pcsn":
        explainer = EXPLAINERS[method](target, radius_power=config.get("radius_power", 0.0))
    elif method == "random":
        explainer = EXPLAINERS[method](target, seed=config.get("seed", 0))
    else:
        explainer = EXPLAINERS[method](target)
    return explainer
