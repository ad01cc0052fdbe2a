"""Utility functions for configuration handling."""

import json
import logging
import os
import platform
from typing import Any, Dict, Mapping, Optional

import numpy as np
import yaml

import pcexplain
from pcexplain.utils.exceptions import ConfigError

logger = logging.getLogger(__name__)

COMMANDS = ("generate", "train", "explain", "evaluate")


# Load Configuration
def load_config(config_path: str) -> Dict[str, Any]:
    """
    Load a YAML or JSON run configuration, handling includes.
    The including file takes priority over the included one.
    """
    logger.info("Loading configuration from %s", config_path)
    config = load_yaml_file(config_path)

    # Handle included configurations if present
    if "include" in config:
        included_config_path = config["include"]
        if not os.path.isabs(included_config_path):
            included_config_path = os.path.join(
                os.path.dirname(os.path.abspath(config_path)), included_config_path
            )
        logger.info("Loading included configuration from %s", included_config_path)
        included_config = load_yaml_file(included_config_path)
        warn_conflicting_values(config, included_config)

        merged_config = merge_configs(included_config, config)
        merged_config.pop("include", None)
        return merged_config

    return config


def load_yaml_file(file_path: str) -> Dict[str, Any]:
    """Helper function to load a YAML (or JSON) mapping."""
    with open(file_path, "r", encoding="UTF-8") as file:
        try:
            content = yaml.safe_load(file)
        except yaml.YAMLError as error:
            raise ConfigError(f"{file_path}: {error}") from error
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise ConfigError(f"{file_path}: expected a mapping at the top level")
    return content


def merge_configs(base_config: Mapping, override_config: Mapping) -> Dict[str, Any]:
    """Recursively merge two configurations, with override_config taking priority."""
    merged = dict(base_config)
    for key, value in override_config.items():
        if isinstance(value, dict) and key in merged and isinstance(merged[key], dict):
            merged[key] = merge_configs(merged[key], value)
        else:
            merged[key] = value
    return merged


def warn_conflicting_values(config: Mapping, included_config: Mapping) -> None:
    """Warn users if there are conflicting values between the two files,
    showing which value will be used."""
    for key, value in included_config.items():
        if key in config and key != "include" and config[key] != value:
            logger.warning(
                "Conflicting value for '%s'. Using value from the including file: %s",
                key,
                config[key],
            )


def resolve_run_config(
    command: str,
    defaults: Mapping[str, Any],
    file_config: Optional[Mapping[str, Any]] = None,
    flags: Optional[Mapping[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Effective settings of one subcommand, lowest priority first: defaults,
    top-level file keys, the file's section for the command, explicit flags.

    Only keys the command knows are taken from the file's top level.
    """
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    file_config = file_config or {}
    section = file_config.get(command) or {}
    if not isinstance(section, dict):
        raise ConfigError(f"the '{command}' section of the config file must be a mapping")

    top_level = {
        key: value
        for key, value in file_config.items()
        if key not in COMMANDS and key in defaults
    }
    ignored = sorted(k for k in file_config if k not in COMMANDS and k not in defaults)
    if ignored:
        logger.debug("Config keys not used by %s: %s", command, ", ".join(ignored))

    config = merge_configs(defaults, top_level)
    config = merge_configs(config, section)
    config = merge_configs(
        config, {key: value for key, value in (flags or {}).items() if value is not None}
    )
    config["command"] = command
    return config


def run_versions() -> Dict[str, str]:
    """Versions that determine the numbers a run produces."""
    return {
        "pcexplain": pcexplain.__version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


def write_run_config(out_dir: str, config: Mapping[str, Any]) -> str:
    """Write the effective settings and versions next to a command's outputs."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "run_config.json")
    with open(path, "w", encoding="UTF-8") as file:
        json.dump(
            {"config": dict(config), "versions": run_versions()},
            file,
            indent=2,
            sort_keys=True,
        )
        file.write("\n")
    return path
