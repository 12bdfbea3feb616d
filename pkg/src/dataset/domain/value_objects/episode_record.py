# src/dataset/domain/value_objects/episode_record.py
"""One video of the dataset."""

from typing import Sequence

import numpy as np

from src.heads.domain.value_objects.label_triple import LabelTriple
from src.objects.domain.value_objects.detection import SnippetDetections
from src.shared.domain.exceptions.base import ValidationException
from src.shared.domain.value_objects.base import ValueObject


class EpisodeRecord(ValueObject):
    """Snippet features, detections and labels of one video, aligned by index."""

    def __init__(
        self,
        video_id: str,
        features: np.ndarray,
        detections: Sequence[SnippetDetections],
        labels: Sequence[LabelTriple],
    ):
        features = np.asarray(features, dtype=np.float32)
        if features.ndim != 2:
            raise ValidationException(f"Features of {video_id} must be [T x D], got {features.shape}")
        num_snippets = features.shape[0]
        if len(detections) != num_snippets or len(labels) != num_snippets:
            raise ValidationException(
                f"Video {video_id}: {num_snippets} feature rows, {len(detections)} detection "
                f"entries and {len(labels)} labels are not aligned"
            )
        for i, dets in enumerate(detections):
            if dets.video_id != video_id or dets.snippet_index != i:
                raise ValidationException(
                    f"Detections entry {i} of {video_id} is keyed {dets.key}"
                )

        self.video_id = video_id
        self.features = features
        self.detections = list(detections)
        self.labels = list(labels)

    @property
    def num_snippets(self) -> int:
        return int(self.features.shape[0])

    @property
    def feature_dim(self) -> int:
        return int(self.features.shape[1])
