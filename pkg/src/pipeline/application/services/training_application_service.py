# src/pipeline/application/services/training_application_service.py
"""Training application service."""

import json
import math
import time
from pathlib import Path
from typing import Sequence

import numpy as np
import structlog

from src.dataset.application.services.dataset_application_service import DatasetApplicationService
from src.dataset.domain.value_objects.episode_record import EpisodeRecord
from src.encoder.domain.value_objects.feature_snippet import FeatureSnippet
from src.heads.domain.value_objects.label_triple import HEADS, LabelTriple
from src.numeric.domain.entities.tensor import Tensor, precision
from src.numeric.domain.services import ops
from src.numeric.domain.services.optimizer import Adam
from src.numeric.domain.services.random import SeedStream
from src.objects.domain.value_objects.detection import ObjectScoreVector
from src.pipeline.application.dto.results_dto import TrainingLogEntryDTO, TrainingResultDTO
from src.pipeline.application.dto.run_config_dto import RunConfig
from src.pipeline.application.services.compatibility import check_compatibility
from src.pipeline.application.services.detector_factory import build_detector
from src.pipeline.domain.entities.action_detector import ActionDetector
from src.pipeline.domain.value_objects.checkpoint import Checkpoint
from src.pipeline.infrastructure.repositories.checkpoint_repository import save_checkpoint
from src.shared.application.services.base import BaseApplicationService
from src.shared.domain.exceptions.base import DataException, DivergenceException, DomainException
from src.shared.infrastructure.monitoring.metrics import (
    TRAINING_LOSS,
    TRAINING_STEP_DURATION,
    TRAINING_STEPS,
)

logger = structlog.get_logger()

TRAIN_LOG_FILE = "train_log.jsonl"
CHECKPOINT_FILE = "checkpoint.oadc"


class PreparedEpisode:
    """Snippets and object scores of one video, computed once per run."""

    def __init__(self, record: EpisodeRecord, detector: ActionDetector):
        self.video_id = record.video_id
        self.labels: list[LabelTriple] = record.labels
        self.snippets = [
            FeatureSnippet(record.video_id, t, record.features[t]) for t in range(record.num_snippets)
        ]
        self.scores: list[ObjectScoreVector] = [detector.object_scores(d) for d in record.detections]

    def __len__(self) -> int:
        return len(self.snippets)


def sequence_loss(
    detector: ActionDetector, episode: PreparedEpisode, end: int, chunk_length: int
) -> tuple[Tensor, dict[str, float]]:
    """Mean loss over the last ``chunk_length`` snippets up to ``end``, encoder run from snippet 0."""
    first = max(0, end - chunk_length + 1)
    state = detector.start()
    total: Tensor | None = None
    parts = dict.fromkeys(HEADS, 0.0)

    for t in range(end + 1):
        outputs = detector.advance(state, episode.snippets[t], episode.scores[t], emit=t >= first)
        if outputs is None:
            continue
        losses = detector.heads.head_losses(outputs, episode.labels[t])
        step_loss = detector.heads.weighted_sum(losses)
        total = step_loss if total is None else total + step_loss
        for head, value in losses.items():
            parts[head] += value.item()

    assert total is not None
    count = end - first + 1
    return ops.mul(total, 1.0 / count), {head: v / count for head, v in parts.items()}


class TrainingApplicationService(BaseApplicationService):
    """Trains one detector on a dataset split and writes its checkpoint."""

    def train(self, config: RunConfig, dataset_root: Path) -> TrainingResultDTO:
        try:
            with precision(config.numeric.dtype):
                return self._train(config, Path(dataset_root))
        except DomainException as e:
            logger.error("Training failed", error=e.message, error_code=e.error_code)
            raise

    def _train(self, config: RunConfig, dataset_root: Path) -> TrainingResultDTO:
        datasets = DatasetApplicationService(dataset_root, self.settings)
        records = datasets.load_split(dataset_root, config.data.train_split)
        check_compatibility(config.model, records, datasets.load_manifest(dataset_root))
        self.write_resolved_config(config)

        detector = build_detector(config)
        episodes = [PreparedEpisode(r, detector) for r in records if r.num_snippets > 0]
        if not episodes:
            raise DataException(f"No non-empty videos to train on under {dataset_root}")
        optimizer = Adam(
            detector.parameters(), lr=config.train.lr, betas=config.train.betas, eps=config.train.eps
        )
        sampler = SeedStream(config.train.seed).split("train", "sampling").generator()
        mode = config.model.integration
        samples_per_step = config.train.batch_size * config.train.grad_accum_steps

        logger.info(
            "Training started",
            integration=mode,
            videos=len(episodes),
            parameters=detector.num_parameters(),
            steps=config.train.steps,
        )

        history: list[TrainingLogEntryDTO] = []
        log_path = self.output_path(TRAIN_LOG_FILE)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        final_loss = None

        with log_path.open("w", encoding="utf-8") as log_file:
            for step in range(1, config.train.steps + 1):
                started = time.perf_counter()
                loss, parts = self._optimizer_step(
                    detector, optimizer, episodes, sampler, config, samples_per_step, step
                )
                final_loss = loss

                TRAINING_STEPS.labels(mode=mode).inc()
                TRAINING_STEP_DURATION.labels(mode=mode).observe(time.perf_counter() - started)

                if step % config.train.log_every == 0 or step == config.train.steps:
                    entry = TrainingLogEntryDTO(
                        step=step,
                        loss=loss,
                        verb_loss=parts["verb"],
                        noun_loss=parts["noun"],
                        action_loss=parts["action"],
                    )
                    history.append(entry)
                    log_file.write(json.dumps(entry.model_dump(), sort_keys=True) + "\n")
                    log_file.flush()
                    TRAINING_LOSS.labels(mode=mode).set(loss)
                    logger.info("Training step", step=step, loss=round(loss, 6))

        checkpoint_path = self.output_path(CHECKPOINT_FILE)
        save_checkpoint(
            checkpoint_path, Checkpoint.from_module(detector, config.model_dump(mode="json"))
        )
        self.finish()

        logger.info("Training finished", checkpoint=str(checkpoint_path), final_loss=final_loss)
        return TrainingResultDTO(
            checkpoint=str(checkpoint_path),
            steps=config.train.steps,
            final_loss=final_loss,
            log=history,
        )

    @staticmethod
    def _optimizer_step(
        detector: ActionDetector,
        optimizer: Adam,
        episodes: Sequence[PreparedEpisode],
        sampler: np.random.Generator,
        config: RunConfig,
        samples: int,
        step: int,
    ) -> tuple[float, dict[str, float]]:
        optimizer.zero_grads()
        loss_value = 0.0
        parts = dict.fromkeys(HEADS, 0.0)

        for _ in range(samples):
            episode = episodes[int(sampler.integers(len(episodes)))]
            end = int(sampler.integers(len(episode)))
            loss, sample_parts = sequence_loss(detector, episode, end, config.train.chunk_length)

            value = loss.item()
            if not math.isfinite(value):
                raise DivergenceException(
                    f"Non-finite loss {value} at step {step} (video {episode.video_id}, snippet {end})"
                )
            ops.mul(loss, 1.0 / samples).backward()

            loss_value += value / samples
            for head in HEADS:
                parts[head] += sample_parts[head] / samples

        optimizer.step()
        return loss_value, parts
