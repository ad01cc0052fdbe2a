"""Subcommand bodies: generate, train, explain and evaluate."""

import json
import logging
import os
from typing import Any, Dict, List, Mapping, Tuple

from pcexplain.app_setup import build_explainer, build_network, build_train_config
from pcexplain.evaluation import ComparisonTable, compare_methods, write_report
from pcexplain.explain import explain_clouds, save_explanation
from pcexplain.networks import load_model, save_model, train
from pcexplain.pointcloud import PointCloud, generate_dataset, load_cloud, load_dataset, save_dataset
from pcexplain.utils.config_utils import write_run_config
from pcexplain.utils.exceptions import PreconditionError, UsageError
from pcexplain.validators.config_validator import ConfigValidator

logger = logging.getLogger(__name__)

COMMON_DEFAULTS: Dict[str, Any] = {
    "seed": 0,
    "verbosity": "INFO",
    "log_format": "standard",
}

EXPLAINER_DEFAULTS: Dict[str, Any] = {
    "split": "test",
    "iterations": 4,
    "drop_count": None,
    "weights": None,
    "target": None,
    "feature_layer": "final",
    "radius_power": 0.0,
    "workers": 4,
}

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "generate": {
        **COMMON_DEFAULTS,
        "out": "data",
        "classes": ["sphere", "box"],
        "per_class": 50,
        "points": 128,
        "test_fraction": 0.2,
        "format": "xyz",
    },
    "train": {
        **COMMON_DEFAULTS,
        "out": "model",
        "manifest": None,
        "net": "fixed",
        "epochs": 30,
        "batch_size": 16,
        "step_size": 1e-3,
        "optimizer": "adam",
        "feature_dim": 64,
        "hidden_dim": 32,
        "mid_dim": 64,
        "head_dim": 32,
        "centroid_ratio": 4,
        "neighbors": 16,
    },
    "explain": {
        **COMMON_DEFAULTS,
        **EXPLAINER_DEFAULTS,
        "out": "explanations",
        "checkpoint": None,
        "cloud": None,
        "manifest": None,
        "method": "ape",
        "export_ply": False,
        "save_iterations": False,
    },
    "evaluate": {
        **COMMON_DEFAULTS,
        **EXPLAINER_DEFAULTS,
        "out": "report",
        "checkpoint": [],
        "manifest": None,
        "methods": ["ape", "gradients", "pcsn"],
        "steps": 11,
    },
}


def check_config(command: str, config: Mapping[str, Any]) -> None:
    """Raise UsageError listing every invalid setting."""
    validator = ConfigValidator(dict(config))
    if not validator.run_config_validation(command):
        raise UsageError("; ".join(validator.errors))


def cmd_generate(config: Mapping[str, Any]) -> str:
    """Sample a labeled dataset and write its clouds and manifest."""
    dataset = generate_dataset(
        config["classes"],
        config["per_class"],
        config["points"],
        config["seed"],
        config["test_fraction"],
    )
    manifest_path = save_dataset(dataset, config["out"], config["format"])
    write_run_config(config["out"], config)
    return manifest_path


def cmd_train(config: Mapping[str, Any]) -> str:
    """Train a network on a manifest's train split; writes checkpoint and metrics."""
    dataset = load_dataset(config["manifest"])
    net = build_network(config["net"], dataset.num_classes, config)
    net.log_summary()
    result = train(net, dataset, build_train_config(config))

    os.makedirs(config["out"], exist_ok=True)
    checkpoint_path = os.path.join(config["out"], "model.ckpt")
    save_model(result.network, checkpoint_path)
    metrics = {
        "architecture": net.kind,
        "class_names": dataset.class_names,
        "majority_prior": dataset.majority_prior("test"),
        "epochs": [row._asdict() for row in result.metrics],
        "final": result.metrics[-1]._asdict(),
    }
    with open(os.path.join(config["out"], "metrics.json"), "w", encoding="UTF-8") as file:
        json.dump(metrics, file, indent=2, sort_keys=True)
        file.write("\n")
    write_run_config(config["out"], config)
    logger.info(
        "Final test accuracy: %s",
        result.metrics[-1].test_accuracy,
        extra={"tag": "train_done", "checkpoint": checkpoint_path},
    )
    return checkpoint_path


def _explain_inputs(config: Mapping[str, Any]) -> List[Tuple[str, PointCloud, str]]:
    if config.get("cloud"):
        path = config["cloud"]
        stem = os.path.splitext(os.path.basename(path))[0]
        return [(stem, load_cloud(path), path)]
    dataset = load_dataset(config["manifest"])
    inputs = []
    for index, cloud in enumerate(dataset.subset(config["split"])):
        stem = f"{config['split']}_{index:04d}_{dataset.class_names[cloud.label]}"
        inputs.append((stem, cloud, config["manifest"]))
    if not inputs:
        raise PreconditionError(f"the {config['split']} split of {config['manifest']} is empty")
    return inputs


def _check_target(config: Mapping[str, Any], num_classes: int) -> None:
    target = config.get("target")
    if target is not None and not 0 <= target < num_classes:
        raise UsageError(f"target class {target} outside [0, {num_classes})")


async def cmd_explain(config: Mapping[str, Any]) -> List[str]:
    """Write one heatmap CSV and metadata JSON per input cloud."""
    net = load_model(config["checkpoint"])
    _check_target(config, net.num_classes)
    explainer = build_explainer(config["method"], config)
    explainer.log_summary()

    inputs = _explain_inputs(config)
    results = await explain_clouds(
        explainer, net, [cloud for _, cloud, _ in inputs], config["workers"]
    )
    written: List[str] = []
    for (stem, cloud, source), result in zip(inputs, results):
        written.extend(
            save_explanation(
                cloud,
                result,
                config["out"],
                stem,
                explainer.get_config(),
                source=source,
                export_ply=config["export_ply"],
                save_iterations=config["save_iterations"],
            )
        )
    write_run_config(config["out"], config)
    return written


def _network_names(checkpoints: List[str], kinds: List[str]) -> List[str]:
    # a kind that appears twice is told apart by its checkpoint directory
    names = []
    for path, kind in zip(checkpoints, kinds):
        if kinds.count(kind) == 1:
            names.append(kind)
        else:
            names.append(f"{kind}:{os.path.basename(os.path.dirname(os.path.abspath(path)))}")
    return names


async def cmd_evaluate(config: Mapping[str, Any]) -> Tuple[str, str]:
    """Frozen heatmaps per method, then both point-dropping curves; writes the report."""
    dataset = load_dataset(config["manifest"])
    clouds = dataset.subset(config["split"])
    if not clouds:
        raise PreconditionError(f"the {config['split']} split of {config['manifest']} is empty")

    nets = [load_model(path) for path in config["checkpoint"]]
    for net in nets:
        _check_target(config, net.num_classes)
    names = _network_names(list(config["checkpoint"]), [net.kind for net in nets])

    table = ComparisonTable()
    for name, net in zip(names, nets):
        heatmaps_by_method = {}
        for method in config["methods"]:
            explainer = build_explainer(method, config)
            results = await explain_clouds(explainer, net, clouds, config["workers"])
            heatmaps_by_method[method] = [result.heatmap for result in results]
        table = table.merge(
            compare_methods(net, clouds, heatmaps_by_method, config["steps"], network=name)
        )

    paths = write_report(
        table,
        config["out"],
        extra={
            "split": config["split"],
            "num_clouds": len(clouds),
            "majority_prior": dataset.majority_prior(config["split"]),
            "steps": config["steps"],
        },
    )
    write_run_config(config["out"], config)
    return paths


def normalize_config(config: Mapping[str, Any]) -> Dict[str, Any]:
    """Accept single values and comma-separated strings where lists are expected."""
    normalized = dict(config)
    for key in ("classes", "methods"):
        if isinstance(normalized.get(key), str):
            normalized[key] = [item.strip() for item in normalized[key].split(",") if item.strip()]
    if normalized.get("command") == "evaluate" and isinstance(normalized.get("checkpoint"), str):
        normalized["checkpoint"] = [normalized["checkpoint"]]
    return normalized


async def run_command(command: str, config: Mapping[str, Any]) -> Any:
    """Validate the configuration and dispatch to the subcommand."""
    config = normalize_config(config)
    check_config(command, config)
    if command == "generate":
        return cmd_generate(config)
    if command == "train":
        return cmd_train(config)
    if command == "explain":
        return await cmd_explain(config)
    return await cmd_evaluate(config)
