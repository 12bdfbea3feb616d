# src/evaluation/domain/services/recall_service.py
"""Top-5 selection and class-mean top-5 recall."""

from collections import defaultdict

import numpy as np

from src.evaluation.domain.value_objects.prediction_log import TOP_K, PredictionLog
from src.heads.domain.value_objects.label_triple import BACKGROUND, HEADS
from src.numeric.domain.entities.tensor import Tensor
from src.shared.domain.exceptions.base import ConfigException, EvaluationException, ValidationException


def top5_ids(logits: Tensor | np.ndarray) -> list[int]:
    """Five highest-scoring non-background ids, descending; ties by ascending id."""
    values = np.asarray(logits.data if isinstance(logits, Tensor) else logits).reshape(-1)
    if values.size - 1 < TOP_K:
        raise ConfigException(
            f"Top-{TOP_K} needs at least {TOP_K} non-background classes, got {values.size - 1}"
        )
    ids = np.arange(1, values.size)
    # lexsort: last key is primary.
    order = np.lexsort((ids, -values[1:]))
    return [int(i) for i in ids[order[:TOP_K]]]


def per_class_recall(log: PredictionLog, head: str) -> dict[int, float]:
    """Recall of every non-background class present in the ground truth."""
    if head not in HEADS:
        raise ValidationException(f"Unknown head: {head}. Expected one of {HEADS}")

    hits: dict[int, int] = defaultdict(int)
    counts: dict[int, int] = defaultdict(int)
    for entry in log:
        if entry.label.background:
            continue
        truth = entry.label.for_head(head)
        if truth == BACKGROUND:
            continue
        counts[truth] += 1
        if truth in entry.top5(head):
            hits[truth] += 1

    return {c: hits[c] / counts[c] for c in sorted(counts)}


def mean_top5_recall(log: PredictionLog, head: str) -> float:
    """Unweighted mean of per-class recall over classes present in the ground truth."""
    recalls = per_class_recall(log, head)
    if not recalls:
        raise EvaluationException(
            f"No non-background ground truth for head '{head}' in a log of {len(log)} snippets"
        )
    return float(sum(recalls.values()) / len(recalls))
