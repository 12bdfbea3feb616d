# src/dataset/infrastructure/repositories/dataset_repository.py
"""Dataset directories: ``features/*.oadf``, ``detections.jsonl`` and ``labels.csv``."""

from pathlib import Path
from typing import Sequence

import structlog

from src.dataset.domain.value_objects.episode_record import EpisodeRecord
from src.encoder.infrastructure.repositories.oadf_feature_repository import (
    SUFFIX,
    OadfFeatureRepository,
)
from src.dataset.infrastructure.repositories.labels_csv_repository import LabelsCsvRepository
from src.objects.domain.value_objects.detection import SnippetDetections
from src.objects.infrastructure.repositories.jsonl_detection_repository import (
    JsonlDetectionRepository,
)
from src.shared.domain.exceptions.base import DataException, DatasetNotFoundException
from src.shared.infrastructure.monitoring.metrics import MISSING_DETECTIONS
from src.shared.infrastructure.repositories.base import BaseFileRepository

logger = structlog.get_logger()

FEATURES_DIR = "features"
DETECTIONS_FILE = "detections.jsonl"
LABELS_FILE = "labels.csv"


class DatasetRepository(BaseFileRepository[list[EpisodeRecord]]):
    """Reads and writes one dataset split directory."""

    def __init__(self) -> None:
        self.features = OadfFeatureRepository()
        self.detections = JsonlDetectionRepository()
        self.labels = LabelsCsvRepository()

    def write(self, path: Path, item: Sequence[EpisodeRecord]) -> None:
        path.mkdir(parents=True, exist_ok=True)
        for record in item:
            self.features.write(path / FEATURES_DIR / f"{record.video_id}{SUFFIX}", record.features)

        self.detections.write_records(
            path / DETECTIONS_FILE,
            (dets for record in sorted(item, key=lambda r: r.video_id) for dets in record.detections),
        )
        self.labels.write(path / LABELS_FILE, {r.video_id: r.labels for r in item})
        logger.info("Dataset written", path=str(path), videos=len(item))

    def read(self, path: Path) -> list[EpisodeRecord]:
        feature_files = sorted((path / FEATURES_DIR).glob(f"*{SUFFIX}"))
        if not feature_files:
            raise DatasetNotFoundException(f"No feature files found under {path / FEATURES_DIR}")

        detections = self.detections.read(path / DETECTIONS_FILE)
        labels = self.labels.read(path / LABELS_FILE)

        records = []
        missing = 0
        for feature_file in feature_files:
            video_id = feature_file.stem
            features = self.features.read(feature_file)
            if video_id not in labels:
                raise DataException(f"No labels for video {video_id} in {path / LABELS_FILE}")
            if len(labels[video_id]) != features.shape[0]:
                raise DataException(
                    f"Video {video_id}: {features.shape[0]} feature rows but "
                    f"{len(labels[video_id])} labels"
                )

            per_snippet = []
            for index in range(features.shape[0]):
                dets = detections.get((video_id, index))
                if dets is None:
                    missing += 1
                    dets = SnippetDetections(video_id, index, ())
                per_snippet.append(dets)

            records.append(EpisodeRecord(video_id, features, per_snippet, labels[video_id]))

        if missing:
            MISSING_DETECTIONS.labels(command="read-dataset").inc(missing)
            logger.warning("Snippets without detections", path=str(path), count=missing)

        logger.info("Dataset loaded", path=str(path), videos=len(records))
        return records


def write_dataset(records: Sequence[EpisodeRecord], directory: Path) -> None:
    DatasetRepository().write(Path(directory), records)


def read_dataset(directory: Path) -> list[EpisodeRecord]:
    return DatasetRepository().read(Path(directory))
