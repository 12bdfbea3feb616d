# src/pipeline/application/services/ablation_application_service.py
"""Ablation over where object information enters the model."""

from pathlib import Path
from typing import Sequence

import structlog

from src.evaluation.domain.value_objects.prediction_log import TOP_K
from src.pipeline.application.dto.results_dto import AblationReportDTO, AblationRowDTO
from src.pipeline.application.dto.run_config_dto import RunConfig, build_run_config
from src.pipeline.application.services.evaluation_application_service import (
    EvaluationApplicationService,
)
from src.pipeline.application.services.training_application_service import (
    TrainingApplicationService,
)
from src.pipeline.domain.value_objects.detector_spec import IntegrationMode
from src.shared.application.services.base import BaseApplicationService
from src.shared.domain.exceptions.base import DomainException

logger = structlog.get_logger()

ABLATION_FILE = "ablation.json"
DEFAULT_MODES = tuple(mode.value for mode in IntegrationMode)
# Noun-recall leads smaller than this are within run-to-run noise of the default scale.
MARGINAL_NOUN_LEAD = 0.01


def noun_chance(config: RunConfig) -> float:
    """Top-5 recall of a model that ignores everything about nouns."""
    return min(1.0, TOP_K / (config.model.head_sizes.noun - 1))


def noun_margins(rows: Sequence[AblationRowDTO]) -> dict[str, float]:
    """How far the object-aware module leads each other mode on noun recall."""
    nouns = {row.integration: row.report.noun for row in rows}
    if IntegrationMode.OA_MODULE.value not in nouns:
        return {}
    lead = nouns[IntegrationMode.OA_MODULE.value]
    return {mode: lead - noun for mode, noun in nouns.items() if mode != IntegrationMode.OA_MODULE.value}


def with_integration(config: RunConfig, integration: str) -> RunConfig:
    raw = config.model_dump(mode="json")
    raw["model"]["integration"] = integration
    return build_run_config(raw)


class AblationApplicationService(BaseApplicationService):
    """Trains and evaluates each integration mode on the same dataset and seed."""

    def run(
        self, config: RunConfig, dataset_root: Path, modes: Sequence[str] = DEFAULT_MODES
    ) -> AblationReportDTO:
        try:
            assert self.out_dir is not None
            self.write_resolved_config(config)
            rows = []
            for integration in modes:
                run_config = with_integration(config, integration)
                run_dir = self.out_dir / integration
                logger.info("Ablation run started", integration=integration, out=str(run_dir))

                trained = TrainingApplicationService(run_dir, self.settings).train(
                    run_config, dataset_root
                )
                report = EvaluationApplicationService(run_dir, self.settings).evaluate(
                    Path(trained.checkpoint), dataset_root, run_config.eval
                )
                rows.append(
                    AblationRowDTO(
                        integration=integration, checkpoint=trained.checkpoint, report=report
                    )
                )

            table = AblationReportDTO(
                noun_chance=noun_chance(config), rows=rows, noun_margins=noun_margins(rows)
            )
            self.write_json(ABLATION_FILE, table.model_dump(mode="json", exclude_none=True))
            self.finish()
            logger.info(
                "Ablation finished",
                nouns={row.integration: round(row.report.noun, 4) for row in rows},
                noun_margins={mode: round(m, 4) for mode, m in table.noun_margins.items()},
            )
            narrow = [mode for mode, m in table.noun_margins.items() if m < MARGINAL_NOUN_LEAD]
            if narrow:
                logger.warning(
                    "Object-aware module does not clearly lead", modes=narrow, threshold=MARGINAL_NOUN_LEAD
                )
            return table

        except DomainException as e:
            logger.error("Ablation failed", error=e.message, error_code=e.error_code)
            raise
