# src/shared/domain/value_objects/base.py
"""Base value object class."""

from abc import ABC
from typing import Any

import numpy as np


def _field_equal(a: Any, b: Any) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return (
            isinstance(a, np.ndarray)
            and isinstance(b, np.ndarray)
            and a.dtype == b.dtype
            and np.array_equal(a, b)
        )
    if isinstance(a, (list, tuple)) and isinstance(b, (list, tuple)):
        return len(a) == len(b) and all(_field_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(_field_equal(v, b[k]) for k, v in a.items())
    return bool(a == b)


def _field_key(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return (value.shape, value.dtype.str, value.tobytes())
    if isinstance(value, (list, tuple)):
        return tuple(_field_key(v) for v in value)
    if isinstance(value, dict):
        return tuple((k, _field_key(v)) for k, v in sorted(value.items()))
    return value


class ValueObject(ABC):
    """Base class for value objects.

    Equality is structural over all attributes; numpy arrays compare by
    shape, dtype and contents.
    """

    def __eq__(self, other: Any) -> bool:
        """Check equality based on all attributes."""
        if not isinstance(other, self.__class__):
            return False
        if self.__dict__.keys() != other.__dict__.keys():
            return False
        return all(_field_equal(v, other.__dict__[k]) for k, v in self.__dict__.items())

    def __hash__(self) -> int:
        """Hash based on all attributes."""
        return hash(tuple((k, _field_key(v)) for k, v in sorted(self.__dict__.items())))

    def __repr__(self) -> str:
        """String representation."""
        attrs = ", ".join(f"{k}={v!r}" for k, v in self.__dict__.items())
        return f"{self.__class__.__name__}({attrs})"
