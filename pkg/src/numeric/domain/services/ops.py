# src/numeric/domain/services/ops.py
"""Differentiable primitives.

Every function returns a new Tensor and registers a closure that maps the
output gradient to one gradient per parent. Broadcasting is limited to
applying a trailing-axis vector (bias, gamma, beta) or a Python scalar.
"""

import math
from typing import Sequence

import numpy as np

from src.numeric.domain.entities.tensor import Tensor
from src.shared.domain.exceptions.base import (
    DataException,
    DimensionException,
    EmptyContextException,
    RankException,
)

_GELU_C = math.sqrt(2.0 / math.pi)


def _require_rank(x: Tensor, rank: int, op: str) -> None:
    if x.ndim != rank:
        raise RankException(f"{op} expects a rank-{rank} tensor, got shape {x.shape}")


def _is_trailing_vector(a: Tensor, b: Tensor) -> bool:
    return b.ndim == 1 and a.ndim >= 1 and a.shape[-1] == b.shape[0] and a.shape != b.shape


def _reduce_to_trailing(grad: np.ndarray) -> np.ndarray:
    return grad.reshape(-1, grad.shape[-1]).sum(axis=0)


def add(a: Tensor, b: Tensor | float) -> Tensor:
    """Elementwise sum; ``b`` may be a scalar or a trailing-axis vector."""
    if not isinstance(b, Tensor):
        scalar = b
        return Tensor.from_op(a.data + scalar, (a,), lambda g: (g,))

    if a.shape == b.shape:
        return Tensor.from_op(a.data + b.data, (a, b), lambda g: (g, g))

    if _is_trailing_vector(a, b):
        return Tensor.from_op(
            a.data + b.data, (a, b), lambda g: (g, _reduce_to_trailing(g))
        )

    raise DimensionException(f"Cannot add shapes {a.shape} and {b.shape}")


def neg(a: Tensor) -> Tensor:
    return Tensor.from_op(-a.data, (a,), lambda g: (-g,))


def sub(a: Tensor, b: Tensor | float) -> Tensor:
    if not isinstance(b, Tensor):
        return add(a, -b)
    return add(a, neg(b))


def mul(a: Tensor, b: Tensor | float) -> Tensor:
    """Elementwise product; ``b`` may be a scalar or a trailing-axis vector."""
    if not isinstance(b, Tensor):
        scalar = b
        return Tensor.from_op(a.data * scalar, (a,), lambda g: (g * scalar,))

    if a.shape == b.shape:
        return Tensor.from_op(
            a.data * b.data, (a, b), lambda g: (g * b.data, g * a.data)
        )

    if _is_trailing_vector(a, b):
        return Tensor.from_op(
            a.data * b.data,
            (a, b),
            lambda g: (g * b.data, _reduce_to_trailing(g * a.data)),
        )

    raise DimensionException(f"Cannot multiply shapes {a.shape} and {b.shape}")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product of ``[m x k]`` and ``[k x n]``."""
    _require_rank(a, 2, "matmul")
    _require_rank(b, 2, "matmul")
    if a.shape[1] != b.shape[0]:
        raise DimensionException(f"matmul inner dimensions differ: {a.shape} x {b.shape}")

    def _backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return g @ b.data.T, a.data.T @ g

    return Tensor.from_op(a.data @ b.data, (a, b), _backward)


def transpose(a: Tensor) -> Tensor:
    _require_rank(a, 2, "transpose")
    return Tensor.from_op(a.data.T.copy(), (a,), lambda g: (g.T,))


def reshape(a: Tensor, shape: tuple[int, ...]) -> Tensor:
    original = a.shape
    try:
        data = a.data.reshape(shape)
    except ValueError as e:
        raise DimensionException(f"Cannot reshape {original} to {shape}") from e
    return Tensor.from_op(data, (a,), lambda g: (g.reshape(original),))


def sum_all(a: Tensor) -> Tensor:
    """Sum of every element as a scalar tensor."""
    return Tensor.from_op(
        np.asarray(a.data.sum(), dtype=a.data.dtype),
        (a,),
        lambda g: (np.full_like(a.data, g),),
    )


def tanh(a: Tensor) -> Tensor:
    y = np.tanh(a.data)
    return Tensor.from_op(y, (a,), lambda g: (g * (1.0 - y * y),))


def sigmoid(a: Tensor) -> Tensor:
    # Split by sign so exp never overflows.
    x = a.data
    z = np.exp(-np.abs(x))
    y = np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z)).astype(x.dtype)
    return Tensor.from_op(y, (a,), lambda g: (g * y * (1.0 - y),))


def gelu(a: Tensor) -> Tensor:
    """GELU, tanh approximation."""
    x = a.data
    inner = _GELU_C * (x + 0.044715 * x**3)
    t = np.tanh(inner)
    y = 0.5 * x * (1.0 + t)

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        d_inner = _GELU_C * (1.0 + 3.0 * 0.044715 * x**2)
        return (g * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * d_inner),)

    return Tensor.from_op(y, (a,), _backward)


def softmax_rows(x: Tensor) -> Tensor:
    """Softmax along the last axis, shifted by the row max."""
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=-1, keepdims=True)

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (y * (g - (g * y).sum(axis=-1, keepdims=True)),)

    return Tensor.from_op(y, (x,), _backward)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize each last-axis slice with its population variance."""
    d = x.shape[-1]
    if gamma.shape != (d,) or beta.shape != (d,):
        raise DimensionException(
            f"layer_norm gamma {gamma.shape} / beta {beta.shape} do not match last axis of {x.shape}"
        )
    if eps <= 0:
        raise DimensionException(f"layer_norm eps must be positive, got {eps}")

    mean = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mean
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    x_hat = centered * inv_std
    y = x_hat * gamma.data + beta.data

    def _backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        d_xhat = g * gamma.data
        dx = inv_std * (
            d_xhat
            - d_xhat.mean(axis=-1, keepdims=True)
            - x_hat * (d_xhat * x_hat).mean(axis=-1, keepdims=True)
        )
        d_gamma = _reduce_to_trailing(g * x_hat)
        d_beta = _reduce_to_trailing(g)
        return dx, d_gamma, d_beta

    return Tensor.from_op(y.astype(x.data.dtype), (x, gamma, beta), _backward)


def columns(x: Tensor, start: int, stop: int) -> Tensor:
    """Slice ``x[:, start:stop]``."""
    _require_rank(x, 2, "columns")
    if not 0 <= start < stop <= x.shape[1]:
        raise DimensionException(f"Column range [{start}, {stop}) out of bounds for {x.shape}")

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        full = np.zeros_like(x.data)
        full[:, start:stop] = g
        return (full,)

    return Tensor.from_op(x.data[:, start:stop].copy(), (x,), _backward)


def concat_columns(tensors: Sequence[Tensor]) -> Tensor:
    """Join rank-2 tensors with equal row counts side by side."""
    if not tensors:
        raise EmptyContextException("concat_columns needs at least one tensor")
    for t in tensors:
        _require_rank(t, 2, "concat_columns")
    rows = {t.shape[0] for t in tensors}
    if len(rows) != 1:
        raise DimensionException(
            f"concat_columns row counts differ: {[t.shape for t in tensors]}"
        )
    bounds = np.cumsum([0] + [t.shape[1] for t in tensors])

    def _backward(g: np.ndarray) -> list[np.ndarray]:
        return [g[:, bounds[i] : bounds[i + 1]] for i in range(len(tensors))]

    return Tensor.from_op(
        np.concatenate([t.data for t in tensors], axis=1), tuple(tensors), _backward
    )


def concat_rows(tensors: Sequence[Tensor]) -> Tensor:
    """Stack rank-2 tensors with equal column counts on top of each other."""
    if not tensors:
        raise EmptyContextException("concat_rows needs at least one tensor")
    for t in tensors:
        _require_rank(t, 2, "concat_rows")
    cols = {t.shape[1] for t in tensors}
    if len(cols) != 1:
        raise DimensionException(f"concat_rows column counts differ: {[t.shape for t in tensors]}")
    bounds = np.cumsum([0] + [t.shape[0] for t in tensors])

    def _backward(g: np.ndarray) -> list[np.ndarray]:
        return [g[bounds[i] : bounds[i + 1]] for i in range(len(tensors))]

    return Tensor.from_op(
        np.concatenate([t.data for t in tensors], axis=0), tuple(tensors), _backward
    )


def max_rows(x: Tensor) -> Tensor:
    """Column-wise max of ``[n x d]``; gradient goes to the first maximal row."""
    _require_rank(x, 2, "max_rows")
    if x.shape[0] == 0:
        raise EmptyContextException("max_rows needs at least one row")
    idx = np.argmax(x.data, axis=0)
    cols = np.arange(x.shape[1])

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        full = np.zeros_like(x.data)
        full[idx, cols] = g
        return (full,)

    return Tensor.from_op(x.data[idx, cols].copy(), (x,), _backward)


def cross_entropy(logits: Tensor, target: int) -> Tensor:
    """Negative log-likelihood of ``target`` under ``softmax(logits)``."""
    _require_rank(logits, 1, "cross_entropy")
    n = logits.shape[0]
    if not 0 <= target < n:
        raise DataException(f"Label {target} out of range for {n} classes")

    shifted = logits.data - logits.data.max()
    log_z = np.log(np.exp(shifted).sum())
    loss = np.asarray(log_z - shifted[target], dtype=logits.data.dtype)

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        probs = np.exp(shifted - log_z)
        probs[target] -= 1.0
        return (g * probs,)

    return Tensor.from_op(loss, (logits,), _backward)


def attention_weights(q: Tensor, k: Tensor) -> Tensor:
    """``softmax_rows(q k^T / sqrt(d))``."""
    _require_rank(q, 2, "attention")
    _require_rank(k, 2, "attention")
    if k.shape[0] == 0:
        raise EmptyContextException("Attention context is empty")
    if q.shape[1] != k.shape[1]:
        raise DimensionException(f"Query {q.shape} and key {k.shape} widths differ")
    scale = 1.0 / math.sqrt(q.shape[1])
    return softmax_rows(mul(matmul(q, transpose(k)), scale))


def scaled_dot_attention(q: Tensor, k: Tensor, v: Tensor) -> Tensor:
    """Single-head scaled dot-product attention."""
    _require_rank(v, 2, "attention")
    if k.shape[0] != v.shape[0]:
        raise DimensionException(f"Key {k.shape} and value {v.shape} row counts differ")
    return matmul(attention_weights(q, k), v)
