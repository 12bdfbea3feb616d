# src/pipeline/application/services/streaming_application_service.py
"""Streaming inference application service."""

import json
from pathlib import Path
from typing import Optional, TextIO

import structlog

from src.encoder.domain.repositories.feature_repository import FeatureRepository
from src.encoder.infrastructure.repositories.oadf_feature_repository import OadfFeatureRepository
from src.evaluation.domain.services.recall_service import top5_ids
from src.heads.domain.value_objects.label_triple import HeadOutputs
from src.numeric.domain.entities.tensor import no_grad, precision
from src.objects.infrastructure.repositories.jsonl_detection_repository import (
    DetectionMap,
    load_detections,
)
from src.pipeline.application.services.detector_factory import (
    read_checkpoint_config,
    restore_detector,
)
from src.shared.application.services.base import BaseApplicationService
from src.shared.domain.exceptions.base import DimensionException, DomainException
from src.shared.infrastructure.monitoring.metrics import MISSING_DETECTIONS, SNIPPETS_PROCESSED

logger = structlog.get_logger()


def prediction_line(snippet_index: int, outputs: HeadOutputs) -> str:
    """One compact JSON object; key order is fixed."""
    return json.dumps(
        {
            "snippet_index": snippet_index,
            "verb_top5": top5_ids(outputs.verb_logits),
            "noun_top5": top5_ids(outputs.noun_logits),
            "action_top5": top5_ids(outputs.action_logits),
        },
        separators=(",", ":"),
    )


class StreamingApplicationService(BaseApplicationService):
    """Emits a prediction per snippet as soon as that snippet has been read."""

    def __init__(
        self,
        sink: TextIO,
        out_dir: Optional[Path] = None,
        features: Optional[FeatureRepository] = None,
    ):
        super().__init__(out_dir)
        self.sink = sink
        self.features = features or OadfFeatureRepository()

    def stream(
        self, checkpoint_path: Path, features_path: Path, detections_path: Optional[Path] = None
    ) -> int:
        """Return the number of predictions written."""
        try:
            return self._stream(Path(checkpoint_path), Path(features_path), detections_path)
        except DomainException as e:
            logger.error("Streaming failed", error=e.message, error_code=e.error_code)
            raise

    def _stream(
        self, checkpoint_path: Path, features_path: Path, detections_path: Optional[Path]
    ) -> int:
        config, checkpoint = read_checkpoint_config(checkpoint_path)
        self.write_resolved_config(config)

        if features_path.is_file() and features_path.stat().st_size == 0:
            logger.warning("Empty feature file, nothing to stream", path=str(features_path))
            return 0

        num_snippets, dim = self.features.read_dim(features_path)
        if num_snippets == 0:
            logger.warning("Feature file holds no snippets", path=str(features_path))
            return 0
        if dim != config.model.feature_dim:
            raise DimensionException(
                f"{features_path}: D={dim}, checkpoint expects {config.model.feature_dim}"
            )

        detections: DetectionMap = load_detections(Path(detections_path)) if detections_path else {}
        written = 0

        with precision(config.numeric.dtype), no_grad():
            detector = restore_detector(config, checkpoint)
            state = detector.start()

            for snippet in self.features.iter_snippets(features_path):
                dets = detections.get((snippet.video_id, snippet.snippet_index))
                if dets is None:
                    MISSING_DETECTIONS.labels(command="stream").inc()
                    logger.warning(
                        "No detections for snippet, using a zero object vector",
                        video_id=snippet.video_id,
                        snippet_index=snippet.snippet_index,
                    )

                outputs = detector.advance(state, snippet, detector.object_scores(dets))
                assert outputs is not None
                self.sink.write(prediction_line(snippet.snippet_index, outputs) + "\n")
                self.sink.flush()
                written += 1
                SNIPPETS_PROCESSED.labels(command="stream").inc()

        self.finish()
        logger.info("Stream finished", path=str(features_path), snippets=written)
        return written
