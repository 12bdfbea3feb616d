# src/pipeline/domain/value_objects/checkpoint.py
"""Checkpoint value object."""

from typing import Any, Mapping

import numpy as np

from src.numeric.domain.entities.module import Module
from src.shared.domain.exceptions.base import CheckpointCorruptionException
from src.shared.domain.value_objects.base import ValueObject


class Checkpoint(ValueObject):
    """Parameter values by dotted name plus the config that produced them."""

    def __init__(self, config: Mapping[str, Any], tensors: Mapping[str, np.ndarray]):
        self.config = dict(config)
        self.tensors = {name: np.asarray(value, dtype=np.float32) for name, value in tensors.items()}

    @classmethod
    def from_module(cls, module: Module, config: Mapping[str, Any]) -> "Checkpoint":
        return cls(config, {name: p.data for name, p in module.named_parameters()})

    def apply_to(self, module: Module) -> None:
        """Copy the stored values into ``module``; names and shapes must match exactly."""
        params = dict(module.named_parameters())
        missing = sorted(set(params) - set(self.tensors))
        unexpected = sorted(set(self.tensors) - set(params))
        if missing or unexpected:
            raise CheckpointCorruptionException(
                f"Checkpoint does not fit the model: missing {missing}, unexpected {unexpected}"
            )
        for name, param in params.items():
            if self.tensors[name].shape != param.shape:
                raise CheckpointCorruptionException(
                    f"Parameter {name}: checkpoint shape {self.tensors[name].shape}, model shape {param.shape}"
                )
            param.assign(self.tensors[name])
