# src/shared/infrastructure/monitoring/metrics.py
"""Prometheus metrics for training, evaluation and streaming runs."""

from pathlib import Path

import structlog
from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram, write_to_textfile

logger = structlog.get_logger()

REGISTRY = CollectorRegistry()

MISSING_DETECTIONS = Counter(
    "oad_missing_detections_total",
    "Snippets without a detection entry, replaced by a zero object vector",
    ["command"],
    registry=REGISTRY,
)

SNIPPETS_PROCESSED = Counter(
    "oad_snippets_processed_total",
    "Snippets run through the detector",
    ["command"],
    registry=REGISTRY,
)

TRAINING_STEPS = Counter(
    "oad_training_steps_total",
    "Optimizer steps taken",
    ["mode"],
    registry=REGISTRY,
)

TRAINING_STEP_DURATION = Histogram(
    "oad_training_step_duration_seconds",
    "Wall time of one optimizer step",
    ["mode"],
    registry=REGISTRY,
)

TRAINING_LOSS = Gauge(
    "oad_training_loss",
    "Most recent logged training loss",
    ["mode"],
    registry=REGISTRY,
)


def export_metrics(path: Path) -> None:
    """Write the registry in the text exposition format."""
    path.parent.mkdir(parents=True, exist_ok=True)
    write_to_textfile(str(path), REGISTRY)
    logger.info("Metrics exported", path=str(path))
