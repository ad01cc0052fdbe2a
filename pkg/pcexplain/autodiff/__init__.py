"""Minimal reverse-mode automatic differentiation."""

from pcexplain.autodiff.functions import (
    add_bias,
    as_tensor,
    concat_columns,
    gather_rows,
    global_avg_pool,
    group_max_pool,
    matmul,
    max_pool_points,
    relu,
    softmax_cross_entropy,
    stable_softmax,
    sub,
    take,
    tensor_sum,
)
from pcexplain.autodiff.grad_check import analytic_gradient, grad_check, numerical_gradient
from pcexplain.autodiff.tensor import GradientStore, Tape, TapeRecord, Tensor, backward

__all__ = [
    "GradientStore",
    "Tape",
    "TapeRecord",
    "Tensor",
    "add_bias",
    "analytic_gradient",
    "as_tensor",
    "backward",
    "concat_columns",
    "gather_rows",
    "global_avg_pool",
    "grad_check",
    "group_max_pool",
    "matmul",
    "max_pool_points",
    "numerical_gradient",
    "relu",
    "softmax_cross_entropy",
    "stable_softmax",
    "sub",
    "take",
    "tensor_sum",
]
