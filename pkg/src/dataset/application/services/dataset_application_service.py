# src/dataset/application/services/dataset_application_service.py
"""Dataset application service."""

import json
from pathlib import Path
from typing import Optional

import structlog
from pydantic import ValidationError

from src.dataset.application.dto.dataset_dto import (
    ClassNamesDTO,
    DatasetManifestDTO,
    HeadClassCountsDTO,
)
from src.dataset.domain.services.synthetic_generator import SyntheticEpisodeGenerator
from src.dataset.domain.value_objects.episode_record import EpisodeRecord
from src.dataset.domain.value_objects.synth_config import SynthConfig
from src.dataset.infrastructure.repositories.dataset_repository import (
    FEATURES_DIR,
    read_dataset,
    write_dataset,
)
from src.heads.domain.value_objects.label_triple import BACKGROUND
from src.shared.application.services.base import BaseApplicationService
from src.shared.domain.exceptions.base import (
    ConfigException,
    DatasetNotFoundException,
    DataException,
    DomainException,
)

logger = structlog.get_logger()

MANIFEST_FILE = "dataset.json"
LABEL_NAMES_FILE = "label_names.json"
OBJECT_NAMES_FILE = "object_names.json"


def split_sizes(num_videos: int, val_fraction: float) -> tuple[int, int]:
    """``(train, val)`` video counts; validation takes the last indices."""
    num_val = int(round(num_videos * val_fraction))
    num_train = num_videos - num_val
    if num_train < 1:
        raise ConfigException(
            f"data.synth.val_fraction={val_fraction} leaves no training videos out of {num_videos}"
        )
    return num_train, num_val


def synthetic_class_names(config: SynthConfig) -> ClassNamesDTO:
    verbs = [f"verb_{v:02d}" for v in range(1, config.num_verbs + 1)]
    nouns = [f"noun_{n:02d}" for n in range(1, config.num_nouns + 1)]
    return ClassNamesDTO(
        verb=["background"] + verbs,
        noun=["background"] + nouns,
        action=["background"] + [f"{v}+{n}" for v in verbs for n in nouns],
    )


class DatasetApplicationService(BaseApplicationService):
    """Generates synthetic datasets and loads dataset splits."""

    def generate(
        self,
        config: SynthConfig,
        val_fraction: float = 0.2,
        train_split: str = "train",
        eval_split: str = "val",
    ) -> DatasetManifestDTO:
        """Write ``train``/``val`` splits, the manifest and the name sidecars."""
        root = self.output_path("")
        try:
            num_train, num_val = split_sizes(config.num_videos, val_fraction)
            generator = SyntheticEpisodeGenerator(config)

            splits = {train_split: range(0, num_train)}
            if num_val:
                splits[eval_split] = range(num_train, config.num_videos)

            for split, indices in splits.items():
                write_dataset([generator.generate_episode(i) for i in indices], root / split)
                logger.info("Split generated", split=split, videos=len(indices))

            sizes = config.head_sizes()
            manifest = DatasetManifestDTO(
                splits={split: len(indices) for split, indices in splits.items()},
                feature_dim=config.feature_dim,
                object_categories=config.object_categories,
                head_sizes=HeadClassCountsDTO(verb=sizes.verb, noun=sizes.noun, action=sizes.action),
                synth=dict(vars(config)),
            )
            self.write_json(MANIFEST_FILE, manifest.model_dump(mode="json"))
            self.write_json(LABEL_NAMES_FILE, synthetic_class_names(config).model_dump())
            self.write_json(
                OBJECT_NAMES_FILE, [f"object_{c:02d}" for c in range(config.object_categories)]
            )

            logger.info("Dataset generated", root=str(root), splits=manifest.splits)
            return manifest

        except DomainException as e:
            logger.error("Error generating dataset", error=e.message)
            raise

    def load_split(self, root: Path, split: str) -> list[EpisodeRecord]:
        """Records of ``root/split``, or of ``root`` itself when it holds features directly."""
        directory = root / split
        if not (directory / FEATURES_DIR).is_dir() and (root / FEATURES_DIR).is_dir():
            directory = root
        if not directory.is_dir():
            raise DatasetNotFoundException(f"Dataset split not found: {directory}")

        try:
            return read_dataset(directory)
        except DomainException as e:
            logger.error("Error loading dataset", path=str(directory), error=e.message)
            raise

    @staticmethod
    def load_manifest(root: Path) -> Optional[DatasetManifestDTO]:
        path = root / MANIFEST_FILE
        if not path.is_file():
            return None
        try:
            return DatasetManifestDTO.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as e:
            raise DataException(f"{path}: invalid dataset manifest: {e.errors()[0]['msg']}") from e

    @staticmethod
    def load_class_names(root: Path) -> Optional[ClassNamesDTO]:
        path = root / LABEL_NAMES_FILE
        if not path.is_file():
            return None
        try:
            return ClassNamesDTO.model_validate(json.loads(path.read_text(encoding="utf-8")))
        except (json.JSONDecodeError, ValidationError) as e:
            logger.warning("Ignoring unreadable class names", path=str(path), error=str(e))
            return None


def label_ranges(records: list[EpisodeRecord]) -> dict[str, int]:
    """Largest id per head and largest object category seen in ``records``."""
    ranges = {"verb": BACKGROUND, "noun": BACKGROUND, "action": BACKGROUND, "object": -1}
    for record in records:
        for label in record.labels:
            ranges["verb"] = max(ranges["verb"], label.verb)
            ranges["noun"] = max(ranges["noun"], label.noun)
            ranges["action"] = max(ranges["action"], label.action)
        for dets in record.detections:
            for det in dets.detections:
                ranges["object"] = max(ranges["object"], det.category_id)
    return ranges
