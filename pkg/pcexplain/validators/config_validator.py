"""Configuration Validator Module."""

import logging
import os
from typing import List

from pcexplain.evaluation.point_drop import DEFAULT_STEPS
from pcexplain.explain import EXPLAINERS
from pcexplain.logfiles.logging_config import LOG_FORMATS
from pcexplain.networks.checkpoint import NETWORK_KINDS
from pcexplain.networks.training import OPTIMIZERS
from pcexplain.pointcloud.cloud_io import CLOUD_FORMATS
from pcexplain.pointcloud.dataset import SPLITS
from pcexplain.pointcloud.shapes import MIN_POINTS, SHAPE_CLASSES

logger = logging.getLogger(__name__)

VERBOSITY_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ConfigValidator:
    """Configuration Validator Class."""

    def __init__(self, config: dict):
        """
        Initialize the ConfigValidator with an effective run configuration.
        Args:
            config (dict): The resolved settings of one subcommand.
        """
        self.config = config
        self.errors: List[str] = []

    def _fail(self, message: str) -> bool:
        logger.error("❌ %s", message)
        self.errors.append(message)
        return False

    def _positive_int(self, key: str, minimum: int = 1) -> bool:
        value = self.config.get(key)
        if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
            return self._fail(f"'{key}' must be an integer ≥ {minimum}, got {value!r}")
        return True

    def _existing_file(self, key: str, value) -> bool:
        if not value:
            return self._fail(f"'{key}' is required")
        if not os.path.isfile(value):
            return self._fail(f"{key} not found: {value}")
        return True

    def validate_common(self) -> bool:
        """Seed, output directory and logging settings."""
        valid = self._positive_int("seed", minimum=0)
        if not self.config.get("out"):
            valid = self._fail("'out' directory is required")
        if str(self.config.get("verbosity", "INFO")).upper() not in VERBOSITY_LEVELS:
            valid = self._fail(
                f"unknown verbosity {self.config.get('verbosity')!r}; "
                f"choose from {', '.join(VERBOSITY_LEVELS)}"
            )
        if self.config.get("log_format", "standard") not in LOG_FORMATS:
            valid = self._fail(
                f"unknown log_format {self.config.get('log_format')!r}; "
                f"choose from {', '.join(LOG_FORMATS)}"
            )
        if valid:
            logger.info("✅ Common configuration is valid.")
        return valid

    def validate_generate(self) -> bool:
        """Shape classes, counts and split settings."""
        valid = True
        classes = self.config.get("classes") or []
        unknown = [name for name in classes if name not in SHAPE_CLASSES]
        if not classes:
            valid = self._fail("'classes' must list at least one shape class")
        elif unknown:
            valid = self._fail(
                f"unknown shape classes {', '.join(unknown)}; "
                f"choose from {', '.join(SHAPE_CLASSES)}"
            )
        valid = self._positive_int("per_class") and valid
        valid = self._positive_int("points", minimum=MIN_POINTS) and valid
        fraction = self.config.get("test_fraction")
        if not isinstance(fraction, (int, float)) or not 0 <= fraction < 1:
            valid = self._fail(f"'test_fraction' must lie in [0, 1), got {fraction!r}")
        if self.config.get("format") not in CLOUD_FORMATS:
            valid = self._fail(
                f"unknown format {self.config.get('format')!r}; "
                f"choose from {', '.join(CLOUD_FORMATS)}"
            )
        if valid:
            logger.info("✅ Generate configuration is valid.")
        return valid

    def validate_train(self) -> bool:
        """Manifest, architecture and optimizer settings."""
        valid = self._existing_file("manifest", self.config.get("manifest"))
        if self.config.get("net") not in NETWORK_KINDS:
            valid = self._fail(
                f"unknown network {self.config.get('net')!r}; "
                f"choose from {', '.join(NETWORK_KINDS)}"
            )
        for key in (
            "epochs",
            "batch_size",
            "feature_dim",
            "hidden_dim",
            "mid_dim",
            "head_dim",
            "neighbors",
        ):
            valid = self._positive_int(key) and valid
        valid = self._positive_int("centroid_ratio", minimum=2) and valid
        step_size = self.config.get("step_size")
        if not isinstance(step_size, (int, float)) or not step_size > 0:
            valid = self._fail(f"'step_size' must be positive, got {step_size!r}")
        if self.config.get("optimizer") not in OPTIMIZERS:
            valid = self._fail(
                f"unknown optimizer {self.config.get('optimizer')!r}; "
                f"choose from {', '.join(OPTIMIZERS)}"
            )
        if valid:
            logger.info("✅ Train configuration is valid.")
        return valid

    def _validate_explainer_settings(self) -> bool:
        valid = self._positive_int("iterations")
        valid = self._positive_int("workers") and valid
        if self.config.get("drop_count") is not None:
            valid = self._positive_int("drop_count", minimum=0) and valid
        weights = self.config.get("weights")
        if weights is not None and (
            len(weights) != self.config.get("iterations")
            or any(not isinstance(w, (int, float)) or w <= 0 for w in weights)
        ):
            valid = self._fail(
                f"'weights' must hold {self.config.get('iterations')} positive values, "
                f"got {weights!r}"
            )
        radius_power = self.config.get("radius_power")
        if not isinstance(radius_power, (int, float)) or radius_power < 0:
            valid = self._fail(f"'radius_power' must be non-negative, got {radius_power!r}")
        if self.config.get("split") not in SPLITS:
            valid = self._fail(
                f"unknown split {self.config.get('split')!r}; choose from {', '.join(SPLITS)}"
            )
        return valid

    def _check_method(self, method) -> bool:
        if method not in EXPLAINERS:
            return self._fail(
                f"unknown method {method!r}; choose from {', '.join(EXPLAINERS)}"
            )
        return True

    def validate_explain(self) -> bool:
        """Checkpoint, input clouds and method settings."""
        valid = self._existing_file("checkpoint", self.config.get("checkpoint"))
        cloud, manifest = self.config.get("cloud"), self.config.get("manifest")
        if bool(cloud) == bool(manifest):
            valid = self._fail("give exactly one of 'cloud' or 'manifest'")
        elif cloud:
            valid = self._existing_file("cloud", cloud) and valid
        else:
            valid = self._existing_file("manifest", manifest) and valid
        valid = self._check_method(self.config.get("method")) and valid
        target = self.config.get("target")
        if target is not None:
            valid = self._positive_int("target", minimum=0) and valid
        valid = self._validate_explainer_settings() and valid
        if valid:
            logger.info("✅ Explain configuration is valid.")
        return valid

    def validate_evaluate(self) -> bool:
        """Checkpoints, manifest, methods and step grid."""
        valid = True
        checkpoints = self.config.get("checkpoint") or []
        if not checkpoints:
            valid = self._fail("at least one 'checkpoint' is required")
        for path in checkpoints:
            valid = self._existing_file("checkpoint", path) and valid
        valid = self._existing_file("manifest", self.config.get("manifest")) and valid
        methods = self.config.get("methods") or []
        if not methods:
            valid = self._fail("'methods' must name at least one method")
        for method in methods:
            valid = self._check_method(method) and valid
        steps = self.config.get("steps", DEFAULT_STEPS)
        if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
            valid = self._fail(f"'steps' must be an integer ≥ 2, got {steps!r}")
        valid = self._validate_explainer_settings() and valid
        if valid:
            logger.info("✅ Evaluate configuration is valid.")
        return valid

    def run_config_validation(self, command: str) -> bool:
        """Validate the common settings and those of one subcommand."""
        common = self.validate_common()
        specific = getattr(self, f"validate_{command}")()
        return common and specific
