"""Define-by-run tape for reverse-mode differentiation over float64 arrays."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from pcexplain.utils.exceptions import ContractError

logger = logging.getLogger(__name__)

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Tensor:
    """Dense float64 array, optionally recorded as a node on a Tape."""

    __slots__ = ("values", "requires_grad", "tape", "node_id")

    def __init__(
        self,
        values,
        requires_grad: bool = False,
        tape: Optional["Tape"] = None,
        node_id: int = -1,
    ):
        self.values = np.asarray(values, dtype=np.float64)
        self.requires_grad = requires_grad
        self.tape = tape
        self.node_id = node_id

    @property
    def shape(self) -> Tuple[int, ...]:
        """Dimension sizes."""
        return self.values.shape

    @property
    def size(self) -> int:
        """Number of stored values."""
        return int(self.values.size)

    @property
    def tracked(self) -> bool:
        """True when the tensor takes part in differentiation."""
        return self.requires_grad and self.tape is not None

    def item(self) -> float:
        """Value of a single-element tensor."""
        return float(self.values.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        """Copy of the values."""
        return self.values.copy()

    def __repr__(self) -> str:
        return (
            f"Tensor(shape={self.shape}, node_id={self.node_id}, "
            f"requires_grad={self.requires_grad})"
        )


@dataclass(frozen=True)
class TapeRecord:
    """One recorded operation: which nodes went in, which came out, how to go back."""

    op_name: str
    input_ids: Tuple[int, ...]
    input_requires_grad: Tuple[bool, ...]
    output_id: int
    backward: BackwardFn


class Tape:
    """Ordered record of the operations of one forward pass.

    Records are appended as operations run, so every record's inputs precede it.
    A tape is confined to one task; build a new one per forward pass.
    """

    def __init__(self) -> None:
        self._records: list[TapeRecord] = []
        self._next_id = 0

    def _new_id(self) -> int:
        node_id = self._next_id
        self._next_id += 1
        return node_id

    def leaf(self, values, requires_grad: bool = False) -> Tensor:
        """Create an input tensor owned by this tape."""
        return Tensor(
            np.array(values, dtype=np.float64),
            requires_grad=requires_grad,
            tape=self,
            node_id=self._new_id(),
        )

    def record(
        self,
        op_name: str,
        inputs: Sequence[Tensor],
        values: np.ndarray,
        backward_fn: BackwardFn,
    ) -> Tensor:
        """Append an operation and return its output node."""
        output = Tensor(values, requires_grad=True, tape=self, node_id=self._new_id())
        self._records.append(
            TapeRecord(
                op_name=op_name,
                input_ids=tuple(t.node_id for t in inputs),
                input_requires_grad=tuple(t.tracked for t in inputs),
                output_id=output.node_id,
                backward=backward_fn,
            )
        )
        return output

    @property
    def records(self) -> Tuple[TapeRecord, ...]:
        """Recorded operations in execution order."""
        return tuple(self._records)

    def owns(self, tensor: Tensor) -> bool:
        """Whether the tensor is a node of this tape."""
        return tensor.tape is self and 0 <= tensor.node_id < self._next_id

    def __len__(self) -> int:
        return len(self._records)


class GradientStore:
    """Gradients keyed by tape node, including intermediate tensors."""

    def __init__(self, grads: Dict[int, np.ndarray]):
        self._grads = grads

    def __contains__(self, tensor: Tensor) -> bool:
        return tensor.node_id in self._grads

    def __getitem__(self, tensor: Tensor) -> np.ndarray:
        grad = self._grads.get(tensor.node_id)
        if grad is None:
            # requires_grad but not on the path to the output
            return np.zeros_like(tensor.values)
        return grad.copy()

    def __len__(self) -> int:
        return len(self._grads)


def backward(tape: Tape, output: Tensor) -> GradientStore:
    """Propagate d(output)/d(node) to every node that requires a gradient.

    The tape is only read, so calling this twice yields identical gradients.
    """
    if output.size != 1:
        raise ContractError(
            f"backward needs a scalar output, got shape {tuple(output.shape)}"
        )
    if not tape.owns(output):
        raise ContractError("backward output is not a node of the given tape")

    grads: Dict[int, np.ndarray] = {output.node_id: np.ones_like(output.values)}
    for record in reversed(tape.records):
        grad_out = grads.get(record.output_id)
        if grad_out is None:
            continue
        input_grads = record.backward(grad_out)
        for input_id, needs_grad, grad in zip(
            record.input_ids, record.input_requires_grad, input_grads
        ):
            if not needs_grad or grad is None:
                continue
            if input_id in grads:
                grads[input_id] = grads[input_id] + grad
            else:
                grads[input_id] = np.array(grad, dtype=np.float64, copy=True)

    logger.debug("Backward over %d records, %d gradients", len(tape), len(grads))
    return GradientStore(grads)
