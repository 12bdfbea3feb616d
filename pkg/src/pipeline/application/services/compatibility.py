# src/pipeline/application/services/compatibility.py
"""Dataset against model checks, run before any optimisation or inference."""

from typing import Optional

from src.dataset.application.dto.dataset_dto import DatasetManifestDTO
from src.dataset.application.services.dataset_application_service import label_ranges
from src.dataset.domain.value_objects.episode_record import EpisodeRecord
from src.pipeline.application.dto.run_config_dto import ModelSectionDTO
from src.shared.domain.exceptions.base import ConfigException


def check_compatibility(
    model: ModelSectionDTO,
    records: list[EpisodeRecord],
    manifest: Optional[DatasetManifestDTO] = None,
) -> None:
    """Raise ``ConfigException`` when the dataset cannot feed this model."""
    for record in records:
        if record.feature_dim != model.feature_dim:
            raise ConfigException(
                f"model.feature_dim is {model.feature_dim} but video {record.video_id} "
                f"has D={record.feature_dim}"
            )

    if manifest is not None and manifest.object_categories != model.num_categories:
        raise ConfigException(
            f"model.num_categories is {model.num_categories} but the dataset has "
            f"{manifest.object_categories} object categories"
        )

    ranges = label_ranges(records)
    if ranges["object"] >= model.num_categories:
        raise ConfigException(
            f"model.num_categories is {model.num_categories} but detections use category {ranges['object']}"
        )
    for head in ("verb", "noun", "action"):
        size = getattr(model.head_sizes, head)
        if ranges[head] >= size:
            raise ConfigException(
                f"model.head_sizes.{head} is {size} but labels use id {ranges[head]}"
            )
