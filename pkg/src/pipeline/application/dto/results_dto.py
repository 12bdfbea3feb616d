# src/pipeline/application/dto/results_dto.py
"""Command result DTOs."""

from typing import Optional

from pydantic import Field

from src.evaluation.application.dto.metric_report_dto import MetricReportDTO
from src.shared.application.dto.base import ReportDTO


class TrainingLogEntryDTO(ReportDTO):
    """One line of ``train_log.jsonl``."""
    step: int = Field(..., ge=1)
    loss: float
    verb_loss: float
    noun_loss: float
    action_loss: float


class TrainingResultDTO(ReportDTO):
    checkpoint: str
    steps: int
    final_loss: Optional[float] = None
    log: list[TrainingLogEntryDTO] = Field(default_factory=list)


class GradcheckGroupDTO(ReportDTO):
    group: str
    max_relative_error: float
    worst_parameter: str
    entries_checked: int
    passed: bool


class GradcheckReportDTO(ReportDTO):
    """Per-group maximum relative error."""
    tolerance: float
    groups: list[GradcheckGroupDTO]

    @property
    def passed(self) -> bool:
        return all(g.passed for g in self.groups)

    @property
    def failing_groups(self) -> list[str]:
        return [g.group for g in self.groups if not g.passed]


class AblationRowDTO(ReportDTO):
    integration: str
    checkpoint: str
    report: MetricReportDTO


class AblationReportDTO(ReportDTO):
    """Recall of every integration mode on one dataset."""
    noun_chance: float
    rows: list[AblationRowDTO]
    noun_margins: dict[str, float] = Field(
        default_factory=dict, description="Noun recall of oa_module minus that of each other mode"
    )
