# src/pipeline/application/services/detector_factory.py
"""Building detectors from configs and checkpoints."""

from pathlib import Path

import structlog

from src.numeric.domain.services.random import SeedStream
from src.pipeline.application.dto.run_config_dto import RunConfig, build_run_config
from src.pipeline.domain.entities.action_detector import ActionDetector
from src.pipeline.domain.value_objects.checkpoint import Checkpoint
from src.pipeline.infrastructure.repositories.checkpoint_repository import load_checkpoint
from src.shared.domain.exceptions.base import CheckpointCorruptionException, ConfigException

logger = structlog.get_logger()


def build_detector(config: RunConfig) -> ActionDetector:
    """Freshly initialised detector; the caller picks the precision."""
    detector = ActionDetector(
        config.model.to_detector_spec(), SeedStream(config.train.seed).split("model")
    )
    logger.debug(
        "Detector built",
        integration=config.model.integration,
        parameters=detector.num_parameters(),
    )
    return detector


def read_checkpoint_config(path: Path) -> tuple[RunConfig, Checkpoint]:
    """Config snapshot and checkpoint at ``path``."""
    checkpoint = load_checkpoint(path)
    try:
        config = build_run_config(checkpoint.config)
    except ConfigException as e:
        raise CheckpointCorruptionException(f"{path}: stored config is invalid: {e.message}") from e
    return config, checkpoint


def restore_detector(config: RunConfig, checkpoint: Checkpoint) -> ActionDetector:
    detector = build_detector(config)
    checkpoint.apply_to(detector)
    return detector
