"""Finite-difference checks for recorded gradients."""

import logging
from typing import Callable, Union

import numpy as np

from pcexplain.autodiff.tensor import Tape, Tensor, backward

logger = logging.getLogger(__name__)

ScalarFn = Callable[[Tensor], Tensor]


def numerical_gradient(f: ScalarFn, x: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar-valued f at x."""
    base = np.array(x, dtype=np.float64)
    grad = np.zeros_like(base)
    for i in range(base.size):
        plus, minus = base.copy(), base.copy()
        plus.flat[i] += eps
        minus.flat[i] -= eps
        grad.flat[i] = (f(Tensor(plus)).item() - f(Tensor(minus)).item()) / (2 * eps)
    return grad


def analytic_gradient(f: ScalarFn, x: np.ndarray) -> np.ndarray:
    """Gradient of f at x from one recorded forward and backward pass."""
    tape = Tape()
    leaf = tape.leaf(x, requires_grad=True)
    return backward(tape, f(leaf))[leaf]


def grad_check(f: ScalarFn, x: Union[Tensor, np.ndarray], eps: float = 1e-5) -> float:
    """Max over coordinates of |analytic − numeric| / max(1, |numeric|)."""
    values = x.values if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64)
    analytic = analytic_gradient(f, values)
    numeric = numerical_gradient(f, values, eps)
    if analytic.size == 0:
        return 0.0
    error = float(
        np.max(np.abs(analytic - numeric) / np.maximum(1.0, np.abs(numeric)))
    )
    logger.debug("grad_check over %d coordinates: %.3e", values.size, error)
    return error
