# src/evaluation/application/dto/metric_report_dto.py
"""Metric report DTOs."""

from typing import Optional

from pydantic import Field

from src.shared.application.dto.base import ReportDTO


class ClassRecallDTO(ReportDTO):
    """Recall of one class."""
    class_id: int
    name: Optional[str] = None
    recall: float = Field(..., ge=0.0, le=1.0)
    instances: int = Field(..., ge=1)


class MetricReportDTO(ReportDTO):
    """Mean top-5 recall per head, as fractions in [0, 1]."""

    verb: float = Field(..., ge=0.0, le=1.0)
    noun: float = Field(..., ge=0.0, le=1.0)
    action: float = Field(..., ge=0.0, le=1.0)
    num_snippets: int = Field(..., ge=0)
    num_classes_evaluated: dict[str, int]
    per_class: Optional[dict[str, list[ClassRecallDTO]]] = None
