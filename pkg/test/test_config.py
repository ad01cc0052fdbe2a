"""Configuration loading, validation and setup testing."""

import json
import logging

import pytest

from pcexplain.app_setup import (
    build_ape_config,
    build_explainer,
    build_network,
    build_train_config,
    record_factory,
)
from pcexplain.explain import APEExplainer, PcSNExplainer, RandomExplainer
from pcexplain.logfiles.logging_config import LEVEL_COLORS, get_log_config
from pcexplain.networks import FixedNet, VariableNet
from pcexplain.runner import DEFAULTS, normalize_config
from pcexplain.utils.config_utils import (
    load_config,
    merge_configs,
    resolve_run_config,
    write_run_config,
)
from pcexplain.utils.exceptions import ConfigError
from pcexplain.validators.config_validator import ConfigValidator


class TestLoadConfig:
    """YAML/JSON files with includes"""

    def test_include_is_overridden(self, tmp_path, caplog):
        """the including file wins and the conflict is reported"""
        (tmp_path / "base.yml").write_text("seed: 1\ntrain:\n  epochs: 5\n  net: fixed\n")
        (tmp_path / "run.yml").write_text("include: base.yml\nseed: 2\ntrain:\n  epochs: 7\n")
        caplog.set_level(logging.WARNING)

        config = load_config(str(tmp_path / "run.yml"))

        assert config == {"seed": 2, "train": {"epochs": 7, "net": "fixed"}}
        assert "Conflicting value for 'seed'" in caplog.text

    def test_json_file(self, tmp_path):
        """JSON is valid YAML"""
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"seed": 4, "evaluate": {"steps": 5}}))

        assert load_config(str(path)) == {"seed": 4, "evaluate": {"steps": 5}}

    def test_empty_file(self, tmp_path):
        """no settings"""
        path = tmp_path / "empty.yml"
        path.write_text("")

        assert load_config(str(path)) == {}

    @pytest.mark.parametrize("content", ["- a\n- b\n", "seed: [1\n"])
    def test_invalid_file(self, tmp_path, content):
        """lists and broken YAML"""
        path = tmp_path / "bad.yml"
        path.write_text(content)

        with pytest.raises(ConfigError):
            load_config(str(path))

    def test_merge_is_recursive(self):
        """nested mappings merge key by key"""
        merged = merge_configs({"a": {"b": 1, "c": 2}}, {"a": {"c": 3}})

        assert merged == {"a": {"b": 1, "c": 3}}


class TestResolveRunConfig:
    """Defaults, file and flags"""

    def test_priority(self):
        """flags over section over top level over defaults"""
        file_config = {"seed": 3, "epochs": 9, "train": {"epochs": 5, "net": "variable"}}
        flags = {"net": "fixed", "epochs": None}

        config = resolve_run_config("train", DEFAULTS["train"], file_config, flags)

        assert config["seed"] == 3
        assert config["epochs"] == 5
        assert config["net"] == "fixed"
        assert config["batch_size"] == 16
        assert config["command"] == "train"

    def test_foreign_top_level_keys_ignored(self):
        """keys of other commands do not leak"""
        config = resolve_run_config("generate", DEFAULTS["generate"], {"steps": 3}, {})

        assert "steps" not in config

    def test_unknown_command(self):
        """only the four subcommands"""
        with pytest.raises(ConfigError):
            resolve_run_config("serve", {}, {}, {})

    def test_section_must_be_mapping(self):
        """a scalar section"""
        with pytest.raises(ConfigError):
            resolve_run_config("train", DEFAULTS["train"], {"train": 3}, {})

    def test_normalize_lists(self):
        """comma strings and single checkpoints"""
        config = normalize_config(
            {"command": "evaluate", "methods": "ape, pcsn", "checkpoint": "m.ckpt"}
        )

        assert config["methods"] == ["ape", "pcsn"]
        assert config["checkpoint"] == ["m.ckpt"]

    def test_run_config_file(self, tmp_path):
        """settings and versions are recorded"""
        path = write_run_config(str(tmp_path), {"seed": 1})

        with open(path, "r", encoding="UTF-8") as file:
            recorded = json.load(file)
        assert recorded["config"] == {"seed": 1}
        assert set(recorded["versions"]) == {"pcexplain", "python", "numpy"}


def resolved(command, **overrides):
    """Default settings of a command with some values replaced."""
    return {**DEFAULTS[command], **overrides, "command": command}


class TestConfigValidator:
    """Per-command validation"""

    def test_generate_defaults_valid(self):
        """defaults pass"""
        assert ConfigValidator(resolved("generate")).run_config_validation("generate")

    @pytest.mark.parametrize(
        "overrides,fragment",
        [
            ({"classes": ["torus"]}, "unknown shape classes torus"),
            ({"per_class": 0}, "'per_class'"),
            ({"points": 8}, "'points'"),
            ({"test_fraction": 1.0}, "'test_fraction'"),
            ({"format": "obj"}, "unknown format"),
            ({"verbosity": "LOUD"}, "unknown verbosity"),
        ],
    )
    def test_generate_errors(self, overrides, fragment):
        """each bad setting is reported"""
        validator = ConfigValidator(resolved("generate", **overrides))

        assert not validator.run_config_validation("generate")
        assert any(fragment in error for error in validator.errors)

    def test_train_missing_manifest(self, tmp_path):
        """manifest path is named"""
        missing = str(tmp_path / "nowhere.json")
        validator = ConfigValidator(resolved("train", manifest=missing))

        assert not validator.validate_train()
        assert validator.errors == [f"manifest not found: {missing}"]

    def test_train_valid(self, manifest_path):
        """defaults plus a manifest pass"""
        assert ConfigValidator(resolved("train", manifest=manifest_path)).validate_train()

    def test_train_centroid_ratio(self, manifest_path):
        """n′ must be smaller than n"""
        validator = ConfigValidator(resolved("train", manifest=manifest_path, centroid_ratio=1))

        assert not validator.validate_train()

    def test_explain_needs_one_input(self, tmp_path, manifest_path):
        """cloud and manifest together"""
        checkpoint = tmp_path / "model.ckpt"
        checkpoint.write_bytes(b"")
        validator = ConfigValidator(
            resolved(
                "explain", checkpoint=str(checkpoint), cloud=manifest_path, manifest=manifest_path
            )
        )

        assert not validator.validate_explain()
        assert "give exactly one of 'cloud' or 'manifest'" in validator.errors

    def test_explain_unknown_method(self, tmp_path, manifest_path):
        """method list in the message"""
        checkpoint = tmp_path / "model.ckpt"
        checkpoint.write_bytes(b"")
        validator = ConfigValidator(
            resolved("explain", checkpoint=str(checkpoint), manifest=manifest_path, method="lime")
        )

        assert not validator.validate_explain()
        assert "unknown method 'lime'; choose from ape, gradients, pcsn, random" in validator.errors

    def test_explain_weights_length(self, tmp_path, manifest_path):
        """one weight per iteration"""
        checkpoint = tmp_path / "model.ckpt"
        checkpoint.write_bytes(b"")
        validator = ConfigValidator(
            resolved(
                "explain", checkpoint=str(checkpoint), manifest=manifest_path, weights=[1.0, 2.0]
            )
        )

        assert not validator.validate_explain()

    def test_evaluate_steps(self, tmp_path, manifest_path):
        """at least two steps"""
        checkpoint = tmp_path / "model.ckpt"
        checkpoint.write_bytes(b"")
        validator = ConfigValidator(
            resolved("evaluate", checkpoint=[str(checkpoint)], manifest=manifest_path, steps=1)
        )

        assert not validator.validate_evaluate()
        assert any("'steps'" in error for error in validator.errors)

    def test_evaluate_needs_checkpoint(self, manifest_path):
        """empty checkpoint list"""
        validator = ConfigValidator(resolved("evaluate", manifest=manifest_path))

        assert not validator.validate_evaluate()


class TestLogging:
    """Log configuration"""

    @pytest.mark.parametrize("log_format", ["standard", "json"])
    def test_formatter_selected(self, log_format):
        """handler uses the requested formatter"""
        config = get_log_config({"verbosity": "DEBUG", "log_format": log_format})

        assert config["handlers"]["standard"]["formatter"] == log_format
        assert config["loggers"][""]["level"] == logging.DEBUG
        assert not config["disable_existing_loggers"]

    def test_unknown_level_falls_back(self):
        """INFO by default"""
        assert get_log_config({"verbosity": "LOUD"})["loggers"][""]["level"] == logging.INFO

    def test_record_colors(self):
        """records carry their level color"""
        record = record_factory("x", logging.WARNING, __file__, 1, "msg", (), None)

        assert record.level_color == LEVEL_COLORS[3]
        assert record.end_color == "\033[0m"


class TestAppSetup:
    """Objects built from settings"""

    @pytest.mark.parametrize("kind,network_class", [("fixed", FixedNet), ("variable", VariableNet)])
    def test_build_network(self, kind, network_class):
        """architecture, widths and class count"""
        net = build_network(kind, 3, {**DEFAULTS["train"], "feature_dim": 8})

        assert isinstance(net, network_class)
        assert net.num_classes == 3
        assert net.config.feature_dim == 8

    def test_build_network_unknown(self):
        """only the two architectures"""
        with pytest.raises(ConfigError):
            build_network("transformer", 2, {})

    def test_build_train_config(self):
        """schedule fields are picked out"""
        cfg = build_train_config({**DEFAULTS["train"], "epochs": 3, "seed": 9})

        assert (cfg.epochs, cfg.seed, cfg.optimizer) == (3, 9, "adam")

    def test_build_ape_config(self):
        """weights become a tuple"""
        cfg = build_ape_config({"iterations": 2, "weights": [1.0, 2.0], "target": 1})

        assert cfg.weights == (1.0, 2.0)
        assert cfg.target_policy == "fixed"

    @pytest.mark.parametrize(
        "method,explainer_class",
        [("ape", APEExplainer), ("pcsn", PcSNExplainer), ("random", RandomExplainer)],
    )
    def test_build_explainer(self, method, explainer_class):
        """method names map onto explainers"""
        explainer = build_explainer(method, DEFAULTS["explain"])

        assert isinstance(explainer, explainer_class)

    def test_build_explainer_unknown(self):
        """unknown method"""
        with pytest.raises(ConfigError):
            build_explainer("lime", {})
