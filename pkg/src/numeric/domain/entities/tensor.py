# src/numeric/domain/entities/tensor.py
"""Tensor and Parameter entities with a dynamically recorded gradient tape."""

import threading
from contextlib import contextmanager
from typing import Any, Callable, Iterator, Sequence

import numpy as np

from src.shared.domain.exceptions.base import ConfigException, RankException

BackwardFn = Callable[[np.ndarray], Sequence[np.ndarray | None]]

DTYPES: dict[str, type[np.floating[Any]]] = {
    "float32": np.float32,
    "float64": np.float64,
}

_default_dtype: type[np.floating[Any]] = np.float32
_grad_state = threading.local()


def get_default_dtype() -> type[np.floating[Any]]:
    """Storage dtype for newly created tensors."""
    return _default_dtype


def set_default_dtype(name: str) -> None:
    """Switch the storage dtype of every tensor created from now on."""
    global _default_dtype
    if name not in DTYPES:
        raise ConfigException(f"Unknown dtype: {name}. Expected one of {sorted(DTYPES)}")
    _default_dtype = DTYPES[name]


@contextmanager
def precision(name: str) -> Iterator[None]:
    """Temporarily build graphs in the given precision (``float32`` or ``float64``)."""
    previous = _default_dtype
    set_default_dtype(name)
    try:
        yield
    finally:
        set_default_dtype(np.dtype(previous).name)


def is_grad_enabled() -> bool:
    """Whether operations on this thread record the tape."""
    return getattr(_grad_state, "enabled", True)


@contextmanager
def no_grad() -> Iterator[None]:
    """Disable tape recording on the current thread."""
    previous = is_grad_enabled()
    _grad_state.enabled = False
    try:
        yield
    finally:
        _grad_state.enabled = previous


class Tensor:
    """Dense row-major array that remembers how it was produced."""

    def __init__(self, data: Any, requires_grad: bool = False):
        self.data: np.ndarray = np.array(data, dtype=get_default_dtype())
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self._parents: tuple["Tensor", ...] = ()
        self._backward: BackwardFn | None = None

    @classmethod
    def from_op(
        cls, data: np.ndarray, parents: Sequence["Tensor"], backward: BackwardFn
    ) -> "Tensor":
        """Wrap an op result, recording the tape only when a parent needs gradients."""
        out = cls.__new__(cls)
        out.data = data
        out.grad = None
        out.requires_grad = is_grad_enabled() and any(p.requires_grad for p in parents)
        if out.requires_grad:
            out._parents = tuple(parents)
            out._backward = backward
        else:
            out._parents = ()
            out._backward = None
        return out

    @property
    def shape(self) -> tuple[int, ...]:
        """Tensor shape."""
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    def numpy(self) -> np.ndarray:
        """Copy of the underlying values."""
        return self.data.copy()

    def item(self) -> float:
        if self.data.size != 1:
            raise RankException(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def backward(self) -> None:
        """Populate gradients of every reachable leaf."""
        backward(self)

    # Operators delegate to the ops service so the tape lives in one place.
    def __add__(self, other: "Tensor | float") -> "Tensor":
        from src.numeric.domain.services import ops

        return ops.add(self, other)

    def __radd__(self, other: float) -> "Tensor":
        from src.numeric.domain.services import ops

        return ops.add(self, other)

    def __sub__(self, other: "Tensor | float") -> "Tensor":
        from src.numeric.domain.services import ops

        return ops.sub(self, other)

    def __rsub__(self, other: float) -> "Tensor":
        from src.numeric.domain.services import ops

        return ops.add(ops.neg(self), other)

    def __mul__(self, other: "Tensor | float") -> "Tensor":
        from src.numeric.domain.services import ops

        return ops.mul(self, other)

    def __rmul__(self, other: float) -> "Tensor":
        from src.numeric.domain.services import ops

        return ops.mul(self, other)

    def __neg__(self) -> "Tensor":
        from src.numeric.domain.services import ops

        return ops.neg(self)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        from src.numeric.domain.services import ops

        return ops.matmul(self, other)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad})"


class Parameter(Tensor):
    """Learnable tensor with a gradient buffer of identical shape."""

    def __init__(self, data: Any, name: str):
        super().__init__(data, requires_grad=True)
        self.name = name
        self.grad = np.zeros_like(self.data)

    @property
    def value(self) -> np.ndarray:
        return self.data

    def zero_grad(self) -> None:
        """Reset the gradient buffer to exact zeros."""
        if self.grad is None or self.grad.shape != self.data.shape or self.grad.dtype != self.data.dtype:
            self.grad = np.zeros_like(self.data)
        else:
            self.grad.fill(0)

    def assign(self, values: np.ndarray) -> None:
        """Overwrite the values in place, keeping dtype and shape."""
        values = np.asarray(values)
        if values.shape != self.data.shape:
            raise RankException(
                f"Cannot assign shape {values.shape} to parameter {self.name} of shape {self.shape}"
            )
        self.data[...] = values

    def __repr__(self) -> str:
        return f"Parameter(name={self.name!r}, shape={self.shape}, dtype={self.data.dtype})"


def _topological_order(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]

    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in reversed(node._parents):
            if id(parent) not in visited:
                stack.append((parent, False))

    return order


def backward(loss: Tensor) -> None:
    """Reverse-mode sweep from a scalar loss.

    Leaf gradients accumulate (``+=``) so repeated sweeps sum, which is what
    gradient accumulation relies on.
    """
    if loss.size != 1:
        raise RankException(f"backward() needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        return

    pending: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}

    for node in reversed(_topological_order(loss)):
        grad = pending.pop(id(node), None)
        if grad is None:
            continue

        if node._backward is None:
            if node.grad is None:
                node.grad = np.zeros_like(node.data)
            node.grad += grad
            continue

        for parent, parent_grad in zip(node._parents, node._backward(grad)):
            if parent_grad is None or not parent.requires_grad:
                continue
            key = id(parent)
            if key in pending:
                pending[key] = pending[key] + parent_grad
            else:
                pending[key] = parent_grad
