"""Differentiable operations used by the point-cloud networks.

Each operation computes its forward value with numpy and, when any input is
tracked, records a closure on the input's tape that maps the output gradient
to input gradients.
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from pcexplain.autodiff.tensor import Tape, Tensor
from pcexplain.utils.exceptions import (
    ClassIndexError,
    ContractError,
    DimensionError,
    PreconditionError,
)


def as_tensor(value) -> Tensor:
    """Wrap arrays and scalars as untracked tensors."""
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value, dtype=np.float64))


def _tape_of(inputs: Sequence[Tensor]) -> Optional[Tape]:
    tapes = {id(t.tape): t.tape for t in inputs if t.tracked}
    if len(tapes) > 1:
        raise ContractError("inputs are recorded on different tapes")
    return next(iter(tapes.values()), None)


def _emit(op_name, inputs: Sequence[Tensor], values: np.ndarray, backward_fn) -> Tensor:
    tape = _tape_of(inputs)
    if tape is None:
        return Tensor(values)
    return tape.record(op_name, inputs, values, backward_fn)


def matmul(a, b) -> Tensor:
    """Matrix product of an m×k (or length-k) tensor with a k×p tensor."""
    a, b = as_tensor(a), as_tensor(b)
    if a.values.ndim not in (1, 2) or b.values.ndim != 2 or a.shape[-1] != b.shape[0]:
        raise DimensionError("matmul", a.shape, b.shape)
    a_val, b_val = a.values, b.values

    def _backward(grad):
        grad_a = grad @ b_val.T
        grad_b = np.outer(a_val, grad) if a_val.ndim == 1 else a_val.T @ grad
        return grad_a, grad_b

    return _emit("matmul", (a, b), a_val @ b_val, _backward)


def add_bias(x, bias) -> Tensor:
    """Add a length-p bias to every row of an m×p (or length-p) tensor."""
    x, bias = as_tensor(x), as_tensor(bias)
    if bias.values.ndim != 1 or x.shape[-1] != bias.shape[0]:
        raise DimensionError("add_bias", x.shape, bias.shape)
    batched = x.values.ndim == 2

    def _backward(grad):
        return grad, grad.sum(axis=0) if batched else grad

    return _emit("add_bias", (x, bias), x.values + bias.values, _backward)


def sub(a, b) -> Tensor:
    """Elementwise difference of two equally shaped tensors."""
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise DimensionError("sub", a.shape, b.shape)

    def _backward(grad):
        return grad, -grad

    return _emit("sub", (a, b), a.values - b.values, _backward)


def concat_columns(a, b) -> Tensor:
    """Join an m×p and an m×q tensor into an m×(p+q) tensor."""
    a, b = as_tensor(a), as_tensor(b)
    if a.values.ndim != 2 or b.values.ndim != 2 or a.shape[0] != b.shape[0]:
        raise DimensionError("concat_columns", a.shape, b.shape)
    split = a.shape[1]

    def _backward(grad):
        return grad[:, :split], grad[:, split:]

    return _emit("concat_columns", (a, b), np.concatenate([a.values, b.values], axis=1), _backward)


def relu(x) -> Tensor:
    """Elementwise max(x, 0); the subgradient at 0 is 0."""
    x = as_tensor(x)
    gate = (x.values > 0).astype(np.float64)

    def _backward(grad):
        return (grad * gate,)

    return _emit("relu", (x,), x.values * gate, _backward)


def max_pool_points(x) -> Tuple[Tensor, np.ndarray]:
    """Per-feature maximum over the point axis of an n′×K tensor.

    Returns the pooled length-K tensor and the winning row per feature; ties go
    to the lowest row index.
    """
    x = as_tensor(x)
    if x.values.ndim != 2 or x.shape[0] < 1:
        raise PreconditionError(f"max_pool_points needs n′ ≥ 1 rows, got {x.shape}")
    argmax = np.argmax(x.values, axis=0)
    columns = np.arange(x.shape[1])
    rows, width = x.shape

    def _backward(grad):
        routed = np.zeros((rows, width))
        routed[argmax, columns] = grad
        return (routed,)

    pooled = _emit("max_pool_points", (x,), x.values[argmax, columns], _backward)
    return pooled, argmax


def group_max_pool(x, group_size: int) -> Tuple[Tensor, np.ndarray]:
    """Max over consecutive blocks of ``group_size`` rows.

    An (G·k)×K tensor becomes G×K. The second result holds the absolute winning
    row per (group, feature), lowest index on ties.
    """
    x = as_tensor(x)
    if x.values.ndim != 2 or group_size < 1 or x.shape[0] % group_size:
        raise PreconditionError(
            f"group_max_pool: {x.shape[0]} rows do not split into groups of {group_size}"
        )
    rows, width = x.shape
    groups = rows // group_size
    blocks = x.values.reshape(groups, group_size, width)
    local = np.argmax(blocks, axis=1)
    winners = local + (np.arange(groups) * group_size)[:, None]
    columns = np.broadcast_to(np.arange(width), winners.shape)

    def _backward(grad):
        routed = np.zeros((rows, width))
        routed[winners, columns] = grad
        return (routed,)

    pooled = _emit("group_max_pool", (x,), x.values[winners, columns], _backward)
    return pooled, winners


def global_avg_pool(x) -> Tensor:
    """Column means of an n′×K tensor."""
    x = as_tensor(x)
    if x.values.ndim != 2 or x.shape[0] < 1:
        raise PreconditionError(f"global_avg_pool needs n′ ≥ 1 rows, got {x.shape}")
    rows = x.shape[0]

    def _backward(grad):
        return (np.broadcast_to(grad / rows, x.shape).copy(),)

    return _emit("global_avg_pool", (x,), x.values.mean(axis=0), _backward)


def gather_rows(x, indices) -> Tensor:
    """Rows of x selected by an integer index array (repeats allowed)."""
    x = as_tensor(x)
    index = np.asarray(indices, dtype=np.int64)
    if index.size and (index.min() < 0 or index.max() >= x.shape[0]):
        raise ContractError(f"gather_rows: index out of range for {x.shape[0]} rows")

    def _backward(grad):
        scattered = np.zeros_like(x.values)
        np.add.at(scattered, index, grad)
        return (scattered,)

    return _emit("gather_rows", (x,), x.values[index], _backward)


def take(x, index: int) -> Tensor:
    """Single element of a vector as a scalar tensor."""
    x = as_tensor(x)
    if x.values.ndim != 1:
        raise ContractError(f"take expects a vector, got shape {x.shape}")
    if not 0 <= index < x.shape[0]:
        raise ClassIndexError(f"index {index} outside [0, {x.shape[0]})")

    def _backward(grad):
        picked = np.zeros_like(x.values)
        picked[index] = grad
        return (picked,)

    return _emit("take", (x,), np.asarray(x.values[index]), _backward)


def tensor_sum(x) -> Tensor:
    """Sum of all elements as a scalar tensor."""
    x = as_tensor(x)

    def _backward(grad):
        return (np.full(x.shape, float(grad)),)

    return _emit("sum", (x,), np.asarray(x.values.sum()), _backward)


def stable_softmax(logits: np.ndarray) -> np.ndarray:
    """Softmax of a logit vector, shifted by its maximum."""
    shifted = np.asarray(logits, dtype=np.float64) - np.max(logits)
    exps = np.exp(shifted)
    return exps / exps.sum()


def softmax_cross_entropy(logits, label: int) -> Tensor:
    """Cross-entropy of softmax(logits) against a class index, as log-sum-exp."""
    logits = as_tensor(logits)
    if logits.values.ndim != 1:
        raise ContractError(f"softmax_cross_entropy expects a vector, got {logits.shape}")
    num_classes = logits.shape[0]
    if not 0 <= label < num_classes:
        raise ClassIndexError(f"label {label} outside [0, {num_classes})")

    shift = np.max(logits.values)
    log_sum_exp = shift + np.log(np.sum(np.exp(logits.values - shift)))
    probs = np.exp(logits.values - log_sum_exp)
    one_hot = np.zeros(num_classes)
    one_hot[label] = 1.0

    def _backward(grad):
        return ((probs - one_hot) * grad,)

    loss = np.asarray(log_sum_exp - logits.values[label])
    return _emit("softmax_cross_entropy", (logits,), loss, _backward)
