# src/pipeline/application/services/gradcheck_application_service.py
"""Gradient check application service."""

from typing import Optional

import numpy as np
import structlog

from src.encoder.domain.value_objects.feature_snippet import FeatureSnippet
from src.heads.domain.value_objects.label_triple import HeadSizes, LabelTriple
from src.numeric.domain.entities.tensor import Tensor, precision
from src.numeric.domain.services.gradient_check import check_gradients
from src.numeric.domain.services.random import SeedStream
from src.oam.domain.value_objects.oa_config import OAConfig
from src.objects.domain.value_objects.detection import ObjectScoreVector
from src.pipeline.application.dto.results_dto import GradcheckGroupDTO, GradcheckReportDTO
from src.pipeline.application.dto.run_config_dto import GradcheckSectionDTO, RunConfig
from src.pipeline.domain.entities.action_detector import ActionDetector
from src.pipeline.domain.value_objects.detector_spec import DetectorSpec
from src.shared.application.services.base import BaseApplicationService
from src.shared.domain.exceptions.base import DomainException, GradientMismatchException

logger = structlog.get_logger()

GRADCHECK_REPORT_FILE = "gradcheck.json"


def parameter_group(name: str) -> str:
    """``oam.<component>`` inside the object-aware module, else the top-level component."""
    parts = name.split(".")
    if parts[0] == "oam" and len(parts) > 1:
        return ".".join(parts[:2])
    return parts[0]


def tiny_spec(section: GradcheckSectionDTO, integration: str) -> DetectorSpec:
    return DetectorSpec(
        integration=integration,
        feature_dim=section.feature_dim,
        hidden_dim=section.hidden_dim,
        num_categories=section.num_categories,
        oa_config=OAConfig(
            num_queries=section.num_queries,
            embed_dim=section.embed_dim,
            num_heads=section.num_heads,
            ffn_mult=2,
            positional_encoding=True,
        ),
        head_sizes=HeadSizes(*section.head_sizes),
        cue_length=section.cue_length,
        object_input_dim=section.object_input_dim,
    )


class GradientCheckApplicationService(BaseApplicationService):
    """Finite-difference check of every parameter group of randomly initialised tiny detectors."""

    def run(self, config: RunConfig, corrupt_group: Optional[str] = None) -> GradcheckReportDTO:
        try:
            section = config.gradcheck
            groups: list[GradcheckGroupDTO] = []
            with precision("float64"):
                for integration in section.modes:
                    groups.extend(self._check_mode(section, integration, corrupt_group))

            report = GradcheckReportDTO(tolerance=section.tolerance, groups=groups)
            self.write_resolved_config(config)
            if self.out_dir is not None:
                self.write_json(GRADCHECK_REPORT_FILE, report.model_dump(mode="json"))
            self.finish()

            logger.info(
                "Gradient check finished",
                groups=len(groups),
                max_relative_error=max((g.max_relative_error for g in groups), default=0.0),
                passed=report.passed,
            )
            return report

        except DomainException as e:
            logger.error("Gradient check failed", error=e.message, error_code=e.error_code)
            raise

    @staticmethod
    def ensure_passed(report: GradcheckReportDTO) -> None:
        if not report.passed:
            raise GradientMismatchException(
                f"Gradient check failed (tolerance {report.tolerance:g}) for groups: "
                + ", ".join(report.failing_groups)
            )

    def _check_mode(
        self, section: GradcheckSectionDTO, integration: str, corrupt_group: Optional[str]
    ) -> list[GradcheckGroupDTO]:
        stream = SeedStream(section.seed).split("gradcheck", integration)
        detector = ActionDetector(tiny_spec(section, integration), stream.split("model"))

        init = stream.split("init").generator()
        for _, param in detector.named_parameters():
            param.assign(init.normal(0.0, section.init_std, param.shape))

        data = stream.split("data").generator()
        snippets, scores, labels = self._random_episode(section, data)

        def loss_fn() -> Tensor:
            state = detector.start()
            total: Tensor | None = None
            for snippet, f, label in zip(snippets, scores, labels):
                outputs = detector.advance(state, snippet, f)
                assert outputs is not None
                loss = detector.loss(outputs, label)
                total = loss if total is None else total + loss
            assert total is not None
            return total

        if corrupt_group is not None and "/" not in corrupt_group:
            corrupt_group = f"{integration}/{corrupt_group}"

        report = check_gradients(
            loss_fn,
            list(detector.named_parameters()),
            group_of=lambda name: f"{integration}/{parameter_group(name)}",
            rng=stream.split("entries").generator(),
            step=section.step,
            max_entries=section.max_entries,
            corrupt_group=corrupt_group,
            tolerance=section.tolerance,
        )

        results = []
        for group, result in report.results.items():
            logger.info(
                "Gradient group checked",
                group=group,
                max_relative_error=result.max_relative_error,
                worst_parameter=result.worst_parameter,
            )
            results.append(
                GradcheckGroupDTO(
                    group=group,
                    max_relative_error=result.max_relative_error,
                    worst_parameter=result.worst_parameter,
                    entries_checked=result.entries_checked,
                    passed=result.max_relative_error < section.tolerance,
                )
            )
        return results

    @staticmethod
    def _random_episode(
        section: GradcheckSectionDTO, rng: np.random.Generator
    ) -> tuple[list[FeatureSnippet], list[ObjectScoreVector], list[LabelTriple]]:
        verb_size, noun_size, action_size = section.head_sizes
        snippets, scores, labels = [], [], []
        for t in range(section.num_snippets):
            snippets.append(
                FeatureSnippet("gradcheck", t, rng.normal(0.0, 1.0, section.feature_dim))
            )
            scores.append(ObjectScoreVector(rng.uniform(0.0, 1.0, section.num_categories)))
            labels.append(
                LabelTriple(
                    int(rng.integers(1, verb_size)),
                    int(rng.integers(1, noun_size)),
                    int(rng.integers(1, action_size)),
                )
            )
        return snippets, scores, labels
