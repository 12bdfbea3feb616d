# src/objects/domain/services/aggregation_service.py
"""Aggregation of detection confidences into object score vectors."""

from enum import Enum

import numpy as np

from src.objects.domain.value_objects.detection import ObjectScoreVector, SnippetDetections
from src.shared.domain.exceptions.base import DataException


class AggregationRule(str, Enum):
    """How several detections of one category collapse into one score."""
    MAX = "max"
    SUM = "sum"
    MEAN = "mean"


def aggregate_scores(
    dets: SnippetDetections,
    num_categories: int,
    rule: AggregationRule | str = AggregationRule.MAX,
) -> ObjectScoreVector:
    """Collapse a snippet's detections into one score per category.

    Absent categories score 0. ``SUM`` is clipped to 1 so the vector stays a
    presence likelihood.
    """
    rule = AggregationRule(rule)
    scores = np.zeros(num_categories, dtype=np.float64)
    counts = np.zeros(num_categories, dtype=np.int64)

    for det in dets.detections:
        c = det.category_id
        if not 0 <= c < num_categories:
            raise DataException(
                f"Detection category {c} out of range [0, {num_categories}) "
                f"in video {dets.video_id}, snippet {dets.snippet_index}"
            )
        if rule is AggregationRule.MAX:
            scores[c] = max(scores[c], det.confidence)
        else:
            scores[c] += det.confidence
        counts[c] += 1

    if rule is AggregationRule.SUM:
        np.clip(scores, 0.0, 1.0, out=scores)
    elif rule is AggregationRule.MEAN:
        present = counts > 0
        scores[present] /= counts[present]

    return ObjectScoreVector(scores)
