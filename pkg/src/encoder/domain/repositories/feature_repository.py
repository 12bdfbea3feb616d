# src/encoder/domain/repositories/feature_repository.py
"""Feature file repository interface."""

from abc import abstractmethod
from pathlib import Path
from typing import Iterator

import numpy as np

from src.encoder.domain.value_objects.feature_snippet import FeatureSnippet
from src.shared.infrastructure.repositories.base import BaseFileRepository


class FeatureRepository(BaseFileRepository[np.ndarray]):
    """Per-video ``[T x D]`` features, readable whole or one snippet at a time."""

    @abstractmethod
    def read_dim(self, path: Path) -> tuple[int, int]:
        """``(T, D)`` from the header alone."""
        pass

    @abstractmethod
    def iter_snippets(self, path: Path) -> Iterator[FeatureSnippet]:
        """Yield snippets in order, reading each only when requested."""
        pass
