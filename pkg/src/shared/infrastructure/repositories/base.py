# src/shared/infrastructure/repositories/base.py
"""Base file repository interface."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Generic, TypeVar

T = TypeVar('T')


class BaseFileRepository(ABC, Generic[T]):
    """Reads and writes one on-disk format."""

    @abstractmethod
    def read(self, path: Path) -> T:
        """Load the file at ``path``."""
        pass

    @abstractmethod
    def write(self, path: Path, item: T) -> None:
        """Persist ``item`` at ``path``, replacing any existing file."""
        pass
