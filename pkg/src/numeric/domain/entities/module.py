# src/numeric/domain/entities/module.py
"""Parameter containers shared by every model component."""

from typing import Iterator

import numpy as np

from src.numeric.domain.entities.tensor import Parameter, Tensor, get_default_dtype
from src.numeric.domain.services import ops


class Module:
    """Base class for anything that owns parameters.

    Parameters and sub-modules are discovered from instance attributes in
    definition order, so names are stable across runs.
    """

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Parameter]]:
        """Yield ``(dotted_name, parameter)`` pairs, depth first."""
        for attr, value in self.__dict__.items():
            if attr.startswith("_"):
                continue
            if isinstance(value, Parameter):
                yield f"{prefix}{attr}", value
            elif isinstance(value, Module):
                yield from value.named_parameters(f"{prefix}{attr}.")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{prefix}{attr}.{i}.")

    def parameters(self) -> list[Parameter]:
        return [p for _, p in self.named_parameters()]

    def bind_names(self) -> None:
        """Set every parameter's ``name`` to its dotted path."""
        for name, param in self.named_parameters():
            param.name = name

    def zero_grads(self) -> None:
        for param in self.parameters():
            param.zero_grad()

    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())


class Linear(Module):
    """Affine map ``x W + b`` on row vectors."""

    def __init__(
        self,
        in_features: int,
        out_features: int,
        rng: np.random.Generator,
        zero_init: bool = False,
    ):
        self.in_features = in_features
        self.out_features = out_features
        if zero_init:
            weight = np.zeros((in_features, out_features))
        else:
            weight = rng.normal(0.0, 1.0 / np.sqrt(in_features), size=(in_features, out_features))
        self.weight = Parameter(weight, name="weight")
        self.bias = Parameter(np.zeros(out_features), name="bias")

    def __call__(self, x: Tensor) -> Tensor:
        return ops.add(ops.matmul(x, self.weight), self.bias)


class LayerNorm(Module):
    """Layer normalization with learnable gain and shift."""

    def __init__(self, dim: int, eps: float = 1e-5):
        self.eps = eps
        self.gamma = Parameter(np.ones(dim, dtype=get_default_dtype()), name="gamma")
        self.beta = Parameter(np.zeros(dim, dtype=get_default_dtype()), name="beta")

    def __call__(self, x: Tensor) -> Tensor:
        return ops.layer_norm(x, self.gamma, self.beta, self.eps)
