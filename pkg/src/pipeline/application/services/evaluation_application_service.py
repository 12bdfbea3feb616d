# src/pipeline/application/services/evaluation_application_service.py
"""Evaluation application service."""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import structlog

from src.dataset.application.dto.dataset_dto import ClassNamesDTO
from src.dataset.application.services.dataset_application_service import DatasetApplicationService
from src.dataset.domain.value_objects.episode_record import EpisodeRecord
from src.encoder.domain.value_objects.feature_snippet import FeatureSnippet
from src.evaluation.application.dto.metric_report_dto import ClassRecallDTO, MetricReportDTO
from src.evaluation.domain.services.recall_service import (
    mean_top5_recall,
    per_class_recall,
    top5_ids,
)
from src.evaluation.domain.value_objects.prediction_log import PredictionEntry, PredictionLog
from src.heads.domain.value_objects.label_triple import HEADS
from src.numeric.domain.entities.tensor import no_grad, precision
from src.pipeline.application.dto.run_config_dto import EvalSectionDTO, RunConfig
from src.pipeline.application.services.compatibility import check_compatibility
from src.pipeline.application.services.detector_factory import (
    read_checkpoint_config,
    restore_detector,
)
from src.pipeline.domain.entities.action_detector import ActionDetector
from src.shared.application.services.base import BaseApplicationService
from src.shared.domain.exceptions.base import DomainException
from src.shared.infrastructure.monitoring.metrics import SNIPPETS_PROCESSED

logger = structlog.get_logger()


def predict_video(detector: ActionDetector, record: EpisodeRecord) -> PredictionLog:
    """Causal pass over one video; each snippet sees only itself and its past."""
    entries = []
    with no_grad():
        state = detector.start()
        for t in range(record.num_snippets):
            snippet = FeatureSnippet(record.video_id, t, record.features[t])
            outputs = detector.advance(state, snippet, detector.object_scores(record.detections[t]))
            assert outputs is not None
            entries.append(
                PredictionEntry(
                    record.video_id,
                    t,
                    verb_top5=top5_ids(outputs.verb_logits),
                    noun_top5=top5_ids(outputs.noun_logits),
                    action_top5=top5_ids(outputs.action_logits),
                    label=record.labels[t],
                )
            )
    return PredictionLog(entries)


def predict_dataset(
    detector: ActionDetector, records: list[EpisodeRecord], workers: int = 1
) -> PredictionLog:
    """Shard videos over ``workers`` threads; the merge is ordered by key."""
    if workers <= 1:
        shards = [predict_video(detector, record) for record in records]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            shards = list(pool.map(lambda r: predict_video(detector, r), records))
    return PredictionLog.merge(shards)


def build_report(
    log: PredictionLog, per_class: bool = False, names: Optional[ClassNamesDTO] = None
) -> MetricReportDTO:
    recalls = {head: per_class_recall(log, head) for head in HEADS}
    means = {head: mean_top5_recall(log, head) for head in HEADS}

    detail = None
    if per_class:
        detail = {}
        for head in HEADS:
            counts: dict[int, int] = {}
            for entry in log:
                truth = entry.label.for_head(head)
                if not entry.label.background:
                    counts[truth] = counts.get(truth, 0) + 1
            detail[head] = [
                ClassRecallDTO(
                    class_id=class_id,
                    name=names.name_of(head, class_id) if names else None,
                    recall=recall,
                    instances=counts[class_id],
                )
                for class_id, recall in recalls[head].items()
            ]

    return MetricReportDTO(
        verb=means["verb"],
        noun=means["noun"],
        action=means["action"],
        num_snippets=len(log),
        num_classes_evaluated={head: len(recalls[head]) for head in HEADS},
        per_class=detail,
    )


class EvaluationApplicationService(BaseApplicationService):
    """Scores a checkpoint on a dataset split with mean top-5 recall."""

    def evaluate(
        self,
        checkpoint_path: Path,
        dataset_root: Path,
        eval_section: Optional[EvalSectionDTO] = None,
        split: Optional[str] = None,
    ) -> MetricReportDTO:
        try:
            config, checkpoint = read_checkpoint_config(Path(checkpoint_path))
            if eval_section is not None:
                config = config.model_copy(update={"eval": eval_section})
            with precision(config.numeric.dtype):
                detector = restore_detector(config, checkpoint)
                return self._evaluate(
                    config, detector, Path(dataset_root), split or config.data.eval_split
                )
        except DomainException as e:
            logger.error("Evaluation failed", error=e.message, error_code=e.error_code)
            raise

    def evaluate_detector(
        self, config: RunConfig, detector: ActionDetector, dataset_root: Path
    ) -> MetricReportDTO:
        with precision(config.numeric.dtype):
            return self._evaluate(config, detector, Path(dataset_root), config.data.eval_split)

    def _evaluate(
        self, config: RunConfig, detector: ActionDetector, dataset_root: Path, split: str
    ) -> MetricReportDTO:
        datasets = DatasetApplicationService(dataset_root, self.settings)
        records = datasets.load_split(dataset_root, split)
        check_compatibility(config.model, records, datasets.load_manifest(dataset_root))
        self.write_resolved_config(config)

        log = predict_dataset(detector, records, config.eval.workers)
        SNIPPETS_PROCESSED.labels(command="eval").inc(len(log))

        names = datasets.load_class_names(dataset_root) if config.eval.per_class else None
        report = build_report(log, config.eval.per_class, names)

        path = self.write_json(config.eval.report_path, report.model_dump(mode="json", exclude_none=True))
        self.finish()
        logger.info(
            "Evaluation finished",
            report=str(path),
            verb=round(report.verb, 4),
            noun=round(report.noun, 4),
            action=round(report.action, 4),
        )
        return report
