"""Exceptions raised across pcexplain."""

from typing import Optional


class PCExplainError(Exception):
    """Base class for all pcexplain errors."""


class ContractError(PCExplainError, ValueError):
    """An argument violates an operation's contract."""


class DimensionError(ContractError):
    """Tensor shapes do not agree."""

    def __init__(self, op_name: str, left_shape: tuple, right_shape: tuple):
        super().__init__(
            f"{op_name}: incompatible shapes {tuple(left_shape)} and {tuple(right_shape)}"
        )
        self.left_shape = tuple(left_shape)
        self.right_shape = tuple(right_shape)


class PreconditionError(PCExplainError, ValueError):
    """An operation was called on input it does not accept (empty, too small...)."""


class PointIndexError(PCExplainError, IndexError):
    """A point index is out of range or refers to a dropped point."""


class ClassIndexError(PCExplainError, IndexError):
    """A class index is outside [0, num_classes)."""


class ParseError(PCExplainError, ValueError):
    """A point-cloud file could not be parsed."""

    def __init__(self, path: str, line_number: int, line: str):
        super().__init__(f"{path}:{line_number}: cannot parse {line!r}")
        self.path = path
        self.line_number = line_number


class ConfigError(PCExplainError, ValueError):
    """Invalid configuration value."""


class TrainingError(PCExplainError, RuntimeError):
    """Training diverged."""

    def __init__(self, message: str, epoch: Optional[int] = None):
        super().__init__(message if epoch is None else f"epoch {epoch}: {message}")
        self.epoch = epoch


class CheckpointError(PCExplainError):
    """A checkpoint file cannot be loaded."""


class UsageError(PCExplainError):
    """Invalid command-line usage."""
