# src/numeric/domain/services/optimizer.py
"""Adam optimizer."""

from typing import Sequence

import numpy as np

from src.numeric.domain.entities.tensor import Parameter
from src.shared.domain.exceptions.base import DivergenceException, ValidationException


class Adam:
    """Adam with bias correction; moments persist across ``step`` calls."""

    def __init__(
        self,
        params: Sequence[Parameter],
        lr: float = 1e-3,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ):
        if lr <= 0:
            raise ValidationException(f"Learning rate must be positive, got {lr}")
        if not all(0.0 <= b < 1.0 for b in betas):
            raise ValidationException(f"Adam betas must lie in [0, 1), got {betas}")

        self.params = list(params)
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.t = 0
        self._m = [np.zeros_like(p.data) for p in self.params]
        self._v = [np.zeros_like(p.data) for p in self.params]

    def step(self) -> None:
        """Apply one update from the gradients currently stored on the parameters."""
        for param in self.params:
            if param.grad is None or not np.all(np.isfinite(param.grad)):
                raise DivergenceException(f"Non-finite gradient in parameter {param.name}")

        self.t += 1
        adam_step(self.params, self._m, self._v, self.lr, self.betas, self.eps, self.t)

    def zero_grads(self) -> None:
        for param in self.params:
            param.zero_grad()


def adam_step(
    params: Sequence[Parameter],
    first_moments: Sequence[np.ndarray],
    second_moments: Sequence[np.ndarray],
    lr: float,
    betas: tuple[float, float],
    eps: float,
    t: int,
) -> None:
    """In-place Adam update at step ``t`` (1-based)."""
    if t < 1:
        raise ValidationException(f"Adam step index starts at 1, got {t}")

    beta1, beta2 = betas
    correction1 = 1.0 - beta1**t
    correction2 = 1.0 - beta2**t

    for param, m, v in zip(params, first_moments, second_moments):
        g = param.grad
        assert g is not None
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        param.data -= (lr * m_hat / (np.sqrt(v_hat) + eps)).astype(param.data.dtype)
