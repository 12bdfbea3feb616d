# src/dataset/infrastructure/repositories/labels_csv_repository.py
"""Per-snippet labels as CSV."""

import csv
from pathlib import Path

import structlog

from src.heads.domain.value_objects.label_triple import LabelTriple
from src.shared.domain.exceptions.base import (
    DataException,
    DomainException,
    ParseException,
)
from src.shared.infrastructure.repositories.base import BaseFileRepository

logger = structlog.get_logger()

HEADER = ["video_id", "snippet_index", "verb", "noun", "action", "background"]

LabelMap = dict[str, list[LabelTriple]]


class LabelsCsvRepository(BaseFileRepository[LabelMap]):
    """Labels grouped by video, ordered by snippet index."""

    def read(self, path: Path) -> LabelMap:
        rows: dict[str, dict[int, LabelTriple]] = {}
        try:
            with path.open("r", encoding="utf-8", newline="") as handle:
                reader = csv.reader(handle)
                header = next(reader, None)
                if header != HEADER:
                    raise ParseException(f"{path}: expected header {','.join(HEADER)}, got {header}", 1)

                for line_number, row in enumerate(reader, start=2):
                    if not row:
                        continue
                    video_id, index, label = self._parse_row(row, line_number)
                    per_video = rows.setdefault(video_id, {})
                    if index in per_video:
                        raise DataException(
                            f"{path}: duplicate label for video {video_id}, snippet {index}"
                        )
                    per_video[index] = label

        except FileNotFoundError as e:
            raise DataException(f"Labels file not found: {path}") from e

        result: LabelMap = {}
        for video_id, per_video in rows.items():
            indices = sorted(per_video)
            if indices != list(range(len(indices))):
                raise DataException(f"{path}: labels of {video_id} are not contiguous from 0")
            result[video_id] = [per_video[i] for i in indices]
        return result

    @staticmethod
    def _parse_row(row: list[str], line_number: int) -> tuple[str, int, LabelTriple]:
        if len(row) != len(HEADER):
            raise ParseException(f"expected {len(HEADER)} columns, got {len(row)}", line_number)
        try:
            video_id = row[0]
            index, verb, noun, action, background = (int(v) for v in row[1:])
            if background not in (0, 1):
                raise DataException(f"background must be 0 or 1, got {row[5]}")
            return video_id, index, LabelTriple(verb, noun, action, background=background == 1)
        except ValueError as e:
            raise ParseException(f"invalid integer: {e}", line_number) from e
        except DomainException as e:
            raise ParseException(e.message, line_number) from e

    def write(self, path: Path, item: LabelMap) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(HEADER)
            for video_id in sorted(item):
                for index, label in enumerate(item[video_id]):
                    writer.writerow(
                        [video_id, index, label.verb, label.noun, label.action, int(label.background)]
                    )
