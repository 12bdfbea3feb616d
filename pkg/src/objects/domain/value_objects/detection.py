# src/objects/domain/value_objects/detection.py
"""Detection value objects."""

from typing import Sequence

import numpy as np

from src.shared.domain.exceptions.base import ValidationException
from src.shared.domain.value_objects.base import ValueObject


class Detection(ValueObject):
    """One detected box on the last frame of a snippet."""

    def __init__(
        self,
        category_id: int,
        confidence: float,
        bbox: Sequence[float] = (0.0, 0.0, 1.0, 1.0),
    ):
        if category_id < 0:
            raise ValidationException(f"category_id must be non-negative, got {category_id}")
        if not 0.0 <= confidence <= 1.0:
            raise ValidationException(f"confidence must lie in [0, 1], got {confidence}")
        if len(bbox) != 4:
            raise ValidationException(f"bbox needs 4 coordinates, got {len(bbox)}")

        x1, y1, x2, y2 = (float(v) for v in bbox)
        if not all(0.0 <= v <= 1.0 for v in (x1, y1, x2, y2)):
            raise ValidationException(f"bbox must be normalized to [0, 1], got {tuple(bbox)}")
        if not (x1 < x2 and y1 < y2):
            raise ValidationException(f"bbox must satisfy x1 < x2 and y1 < y2, got {tuple(bbox)}")

        self.category_id = int(category_id)
        self.confidence = float(confidence)
        # Spatial extent is kept for the file format only; the model ignores it.
        self.bbox = (x1, y1, x2, y2)


class SnippetDetections(ValueObject):
    """All detections anchored to one snippet of one video."""

    def __init__(self, video_id: str, snippet_index: int, detections: Sequence[Detection] = ()):
        if not video_id:
            raise ValidationException("video_id cannot be empty")
        if snippet_index < 0:
            raise ValidationException(f"snippet_index must be non-negative, got {snippet_index}")

        self.video_id = video_id
        self.snippet_index = int(snippet_index)
        self.detections = tuple(detections)

    @property
    def key(self) -> tuple[str, int]:
        return (self.video_id, self.snippet_index)


class ObjectScoreVector(ValueObject):
    """Per-category object presence scores of one snippet, shape ``[1 x C]``."""

    def __init__(self, scores: np.ndarray | Sequence[float]):
        values = np.asarray(scores, dtype=np.float64).reshape(1, -1)
        if values.shape[1] < 1:
            raise ValidationException("ObjectScoreVector needs at least one category")
        if not np.all((values >= 0.0) & (values <= 1.0)):
            raise ValidationException("Object scores must lie in [0, 1]")
        self.scores = values

    @classmethod
    def zeros(cls, num_categories: int) -> "ObjectScoreVector":
        """Vector for a snippet where nothing was detected."""
        return cls(np.zeros(num_categories))

    @property
    def num_categories(self) -> int:
        return int(self.scores.shape[1])
