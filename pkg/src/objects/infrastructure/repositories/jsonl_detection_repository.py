# src/objects/infrastructure/repositories/jsonl_detection_repository.py
"""JSON Lines implementation of the detections store."""

import json
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import structlog
from pydantic import ValidationError

from src.objects.domain.value_objects.detection import SnippetDetections
from src.objects.infrastructure.models.detection_record import SnippetDetectionsRecord
from src.shared.domain.exceptions.base import DataException, ParseException
from src.shared.infrastructure.repositories.base import BaseFileRepository

logger = structlog.get_logger()

DetectionMap = dict[tuple[str, int], SnippetDetections]


def _describe(error: ValidationError) -> str:
    first = error.errors()[0]
    field = ".".join(str(part) for part in first["loc"]) or "<line>"
    return f"field '{field}': {first['msg']}"


def parse_line(line: str, line_number: int) -> SnippetDetections:
    """Parse one JSON Lines record."""
    try:
        record = SnippetDetectionsRecord.model_validate_json(line)
    except ValidationError as e:
        raise ParseException(_describe(e), line_number) from e
    return record.to_domain()


def iter_detections(path: Path) -> Iterator[SnippetDetections]:
    """Yield records in file order, skipping blank lines."""
    with path.open("r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            yield parse_line(line, line_number)


class JsonlDetectionRepository(BaseFileRepository[DetectionMap]):
    """Detections keyed by ``(video_id, snippet_index)``."""

    def read(self, path: Path) -> DetectionMap:
        """Load a detections file; duplicate keys are rejected."""
        try:
            result: DetectionMap = {}
            for dets in iter_detections(path):
                if dets.key in result:
                    raise DataException(
                        f"Duplicate detections for video {dets.video_id}, "
                        f"snippet {dets.snippet_index} in {path}"
                    )
                result[dets.key] = dets

            logger.info("Detections loaded", path=str(path), snippets=len(result))
            return result

        except FileNotFoundError as e:
            raise DataException(f"Detections file not found: {path}") from e
        except Exception as e:
            logger.error("Detections load failed", path=str(path), error=str(e))
            raise

    def write(self, path: Path, item: Mapping[tuple[str, int], SnippetDetections]) -> None:
        """Write records sorted by ``(video_id, snippet_index)``."""
        self.write_records(path, (item[key] for key in sorted(item)))

    def write_records(self, path: Path, records: Iterable[SnippetDetections]) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        count = 0
        with path.open("w", encoding="utf-8", newline="\n") as handle:
            for dets in records:
                payload = SnippetDetectionsRecord.from_domain(dets).model_dump()
                handle.write(json.dumps(payload) + "\n")
                count += 1
        logger.info("Detections written", path=str(path), snippets=count)


def load_detections(path: Path) -> DetectionMap:
    return JsonlDetectionRepository().read(Path(path))


def write_detections(path: Path, detections: Mapping[tuple[str, int], SnippetDetections]) -> None:
    JsonlDetectionRepository().write(Path(path), detections)
