# src/encoder/domain/value_objects/feature_snippet.py
"""Snippet feature and recurrent state value objects."""

from dataclasses import dataclass

import numpy as np

from src.numeric.domain.entities.tensor import Tensor
from src.shared.domain.exceptions.base import DataException, ValidationException
from src.shared.domain.value_objects.base import ValueObject


class FeatureSnippet(ValueObject):
    """Visual feature of one snippet (one stride step of the video)."""

    def __init__(self, video_id: str, snippet_index: int, feature: np.ndarray):
        feature = np.asarray(feature)
        if feature.ndim != 1 or feature.size == 0:
            raise ValidationException(f"Snippet feature must be a non-empty vector, got {feature.shape}")
        if not np.all(np.isfinite(feature)):
            raise DataException(
                f"Non-finite feature in video {video_id}, snippet {snippet_index}"
            )
        if snippet_index < 0:
            raise ValidationException(f"snippet_index must be non-negative, got {snippet_index}")

        self.video_id = video_id
        self.snippet_index = int(snippet_index)
        self.feature = feature

    @property
    def dim(self) -> int:
        return int(self.feature.shape[0])

    def as_row(self) -> Tensor:
        """Feature as a ``[1 x D]`` constant tensor."""
        return Tensor(self.feature.reshape(1, -1))


@dataclass(frozen=True)
class EncoderState:
    """Hidden state ``[1 x H]`` after ``t`` consumed snippets."""

    h: Tensor
    t: int = 0
