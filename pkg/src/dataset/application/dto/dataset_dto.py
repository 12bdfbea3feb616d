# src/dataset/application/dto/dataset_dto.py
"""Dataset DTOs."""

from typing import Any, Optional

from pydantic import Field

from src.shared.application.dto.base import ReportDTO


class HeadClassCountsDTO(ReportDTO):
    """Class counts per head, background included."""
    verb: int = Field(..., ge=2)
    noun: int = Field(..., ge=2)
    action: int = Field(..., ge=2)


class DatasetManifestDTO(ReportDTO):
    """Contents of ``dataset.json``."""
    format_version: int = 1
    splits: dict[str, int]
    feature_dim: int = Field(..., ge=1)
    object_categories: int = Field(..., ge=1)
    head_sizes: HeadClassCountsDTO
    synth: Optional[dict[str, Any]] = None


class ClassNamesDTO(ReportDTO):
    """Human-readable names; ids stay authoritative."""
    verb: list[str] = Field(default_factory=list)
    noun: list[str] = Field(default_factory=list)
    action: list[str] = Field(default_factory=list)

    def name_of(self, head: str, class_id: int) -> Optional[str]:
        names = getattr(self, head)
        return names[class_id] if 0 <= class_id < len(names) else None
