"""Main file for pcexplain"""

import argparse
import asyncio
import logging
import sys
from typing import List, Optional

from pcexplain import __version__
from pcexplain.app_setup import record_factory, setup_logging
from pcexplain.runner import DEFAULTS, run_command
from pcexplain.utils.config_utils import load_config, resolve_run_config
from pcexplain.utils.exceptions import ConfigError, PCExplainError, UsageError

logger = logging.getLogger("main")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _comma_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _float_list(value: str) -> List[float]:
    try:
        return [float(item) for item in _comma_list(value)]
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}") from error


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="Seed for every random choice")
    parser.add_argument("-c", "--config", help="YAML or JSON file with settings")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--verbosity", help="Log level (DEBUG, INFO, WARNING, ...)")
    parser.add_argument("--log-format", dest="log_format", help="standard or json")


def _add_explainer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--split", help="Manifest split to use (train or test)")
    parser.add_argument("--iterations", type=int, help="Number of initial heatmaps λ")
    parser.add_argument(
        "--drop-count", dest="drop_count", type=int, help="Points dropped per iteration"
    )
    parser.add_argument("--weights", type=_float_list, help="Comma-separated merge weights")
    parser.add_argument(
        "--feature-layer", dest="feature_layer", help="Feature layer to explain (final, hidden)"
    )
    parser.add_argument(
        "--radius-power", dest="radius_power", type=float, help="Radius exponent for pcsn"
    )
    parser.add_argument("--workers", type=int, help="Clouds explained concurrently")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one sub-parser per command."""
    parser = argparse.ArgumentParser(
        prog="pcexplain",
        description="Train point-cloud classifiers and explain their decisions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="Sample a synthetic labeled dataset")
    _add_common(generate)
    generate.add_argument("--classes", type=_comma_list, help="Comma-separated shape classes")
    generate.add_argument("--per-class", dest="per_class", type=int, help="Clouds per class")
    generate.add_argument("--points", type=int, help="Points per cloud")
    generate.add_argument(
        "--test-fraction", dest="test_fraction", type=float, help="Test share per class"
    )
    generate.add_argument("--format", help="Cloud file format (xyz or csv)")

    train = commands.add_parser("train", help="Train a classifier on a dataset manifest")
    _add_common(train)
    train.add_argument("--manifest", help="Dataset manifest.json")
    train.add_argument("--net", help="Network kind (fixed or variable)")
    train.add_argument("--epochs", type=int)
    train.add_argument("--batch-size", dest="batch_size", type=int)
    train.add_argument("--step-size", dest="step_size", type=float)
    train.add_argument("--optimizer", help="adam or sgd")
    train.add_argument("--feature-dim", dest="feature_dim", type=int)
    train.add_argument("--neighbors", type=int, help="Group size of the variable network")
    train.add_argument(
        "--centroid-ratio", dest="centroid_ratio", type=int, help="n / n′ of the variable network"
    )

    explain = commands.add_parser("explain", help="Write heatmaps for clouds")
    _add_common(explain)
    explain.add_argument("--checkpoint", help="Trained model checkpoint")
    explain.add_argument("--cloud", help="Single .xyz or .csv cloud")
    explain.add_argument("--manifest", help="Dataset manifest.json")
    explain.add_argument("--method", help="ape, gradients, pcsn or random")
    explain.add_argument("--target", type=int, help="Class to explain (default: predicted)")
    explain.add_argument(
        "--export-ply", dest="export_ply", action="store_const", const=True, help="Write colored PLY"
    )
    explain.add_argument(
        "--save-iterations",
        dest="save_iterations",
        action="store_const",
        const=True,
        help="Write every initial heatmap",
    )
    _add_explainer_flags(explain)

    evaluate = commands.add_parser("evaluate", help="Compare methods by point dropping")
    _add_common(evaluate)
    evaluate.add_argument(
        "--checkpoint", action="append", help="Trained model checkpoint (repeatable)"
    )
    evaluate.add_argument("--manifest", help="Dataset manifest.json")
    evaluate.add_argument("--methods", type=_comma_list, help="Comma-separated methods")
    evaluate.add_argument("--steps", type=int, help="Drop fractions from 0 to 1")
    _add_explainer_flags(evaluate)
    return parser


async def main(argv: Optional[List[str]] = None) -> int:
    """Main function for pcexplain."""
    try:
        arguments = build_parser().parse_args(argv)
    except SystemExit as exit_request:
        return EXIT_USAGE if exit_request.code else EXIT_OK

    flags = vars(arguments)
    command = flags.pop("command")
    config_file = flags.pop("config")

    setup_logging({"verbosity": flags.get("verbosity") or "INFO"})
    logging.setLogRecordFactory(record_factory)

    try:
        file_config = load_config(config_file) if config_file else {}
        config = resolve_run_config(command, DEFAULTS[command], file_config, flags)
        setup_logging(config)
        await run_command(command, config)
    except (UsageError, ConfigError, FileNotFoundError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except PCExplainError as e:
        logger.error("%s failed: %s", command, e)
        return EXIT_FAILURE
    except Exception as e:  # pylint: disable=broad-except
        logger.exception("%s encountered an error: %s", command, e)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
