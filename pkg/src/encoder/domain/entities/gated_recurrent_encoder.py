# src/encoder/domain/entities/gated_recurrent_encoder.py
"""Minimal gated recurrent encoder producing the temporal cues."""

from collections import deque
from typing import Sequence

import numpy as np

from src.encoder.domain.value_objects.feature_snippet import EncoderState, FeatureSnippet
from src.numeric.domain.entities.module import Module
from src.numeric.domain.entities.tensor import Parameter, Tensor, get_default_dtype
from src.numeric.domain.services import ops
from src.shared.domain.exceptions.base import (
    DimensionException,
    EmptyContextException,
    ValidationException,
)


class GatedRecurrentEncoder(Module):
    """Single-gate recurrent cell on row vectors.

    z  = sigmoid(x W_z + h U_z + b_z)
    h~ = tanh(x W_h + (z * h) U_h + b_h)
    h' = (1 - z) * h + z * h~
    """

    def __init__(self, input_dim: int, hidden_dim: int, rng: np.random.Generator):
        if input_dim < 1 or hidden_dim < 1:
            raise ValidationException(
                f"Encoder dimensions must be positive, got D={input_dim}, H={hidden_dim}"
            )
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim

        x_std = 1.0 / np.sqrt(input_dim)
        h_std = 1.0 / np.sqrt(hidden_dim)
        self.w_z = Parameter(rng.normal(0.0, x_std, (input_dim, hidden_dim)), name="w_z")
        self.u_z = Parameter(rng.normal(0.0, h_std, (hidden_dim, hidden_dim)), name="u_z")
        self.b_z = Parameter(np.zeros(hidden_dim), name="b_z")
        self.w_h = Parameter(rng.normal(0.0, x_std, (input_dim, hidden_dim)), name="w_h")
        self.u_h = Parameter(rng.normal(0.0, h_std, (hidden_dim, hidden_dim)), name="u_h")
        self.b_h = Parameter(np.zeros(hidden_dim), name="b_h")

    def initial_state(self) -> EncoderState:
        """Zero state at the start of every video."""
        return EncoderState(h=Tensor(np.zeros((1, self.hidden_dim), dtype=get_default_dtype())), t=0)

    def step(self, state: EncoderState, x: FeatureSnippet | Tensor) -> tuple[EncoderState, Tensor]:
        """Consume one snippet; returns the new state and its cue ``[1 x H]``."""
        if isinstance(x, FeatureSnippet):
            x = x.as_row()
        if x.shape != (1, self.input_dim):
            raise DimensionException(
                f"Encoder expects input of shape (1, {self.input_dim}), got {x.shape}"
            )

        h = state.h
        z = ops.sigmoid(ops.matmul(x, self.w_z) + ops.matmul(h, self.u_z) + self.b_z)
        candidate = ops.tanh(
            ops.matmul(x, self.w_h) + ops.matmul(ops.mul(z, h), self.u_h) + self.b_h
        )
        h_next = ops.mul(1.0 - z, h) + ops.mul(z, candidate)
        return EncoderState(h=h_next, t=state.t + 1), h_next

    def encode_window(self, features: Sequence[FeatureSnippet | Tensor], length: int) -> Tensor:
        """Run from the zero state; returns the last ``length`` cues stacked ``[L x H]``."""
        if not features:
            raise EmptyContextException("encode_window needs at least one snippet")
        buffer = CueBuffer(length)
        state = self.initial_state()
        for x in features:
            state, cue = self.step(state, x)
            buffer.push(cue)
        return buffer.as_tensor()


class CueBuffer:
    """Ring buffer holding the most recent cues."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValidationException(f"Cue buffer capacity must be at least 1, got {capacity}")
        self.capacity = capacity
        self._rows: deque[Tensor] = deque(maxlen=capacity)

    def push(self, cue: Tensor) -> None:
        self._rows.append(cue)

    def __len__(self) -> int:
        return len(self._rows)

    def as_tensor(self) -> Tensor:
        """Cues oldest first, ``[len x H]``."""
        if not self._rows:
            raise EmptyContextException("No temporal cues have been produced yet")
        return ops.concat_rows(list(self._rows))
