# src/evaluation/domain/value_objects/prediction_log.py
"""Per-snippet predictions kept for evaluation."""

from typing import Iterable, Iterator, Sequence

from src.heads.domain.value_objects.label_triple import HEADS, LabelTriple
from src.shared.domain.exceptions.base import ValidationException
from src.shared.domain.value_objects.base import ValueObject

TOP_K = 5


class PredictionEntry(ValueObject):
    """Top-5 ids per head for one snippet, with its ground truth."""

    def __init__(
        self,
        video_id: str,
        snippet_index: int,
        verb_top5: Sequence[int],
        noun_top5: Sequence[int],
        action_top5: Sequence[int],
        label: LabelTriple,
    ):
        for head, ids in zip(HEADS, (verb_top5, noun_top5, action_top5)):
            if len(ids) != TOP_K or len(set(ids)) != TOP_K:
                raise ValidationException(
                    f"{head} prediction for {video_id}/{snippet_index} needs {TOP_K} distinct ids, got {list(ids)}"
                )
        self.video_id = video_id
        self.snippet_index = int(snippet_index)
        self.verb_top5 = tuple(int(i) for i in verb_top5)
        self.noun_top5 = tuple(int(i) for i in noun_top5)
        self.action_top5 = tuple(int(i) for i in action_top5)
        self.label = label

    @property
    def key(self) -> tuple[str, int]:
        return (self.video_id, self.snippet_index)

    def top5(self, head: str) -> tuple[int, ...]:
        if head not in HEADS:
            raise ValidationException(f"Unknown head: {head}. Expected one of {HEADS}")
        return getattr(self, f"{head}_top5")


class PredictionLog:
    """Entries ordered by ``(video_id, snippet_index)``."""

    def __init__(self, entries: Iterable[PredictionEntry] = ()):
        self._entries = sorted(entries, key=lambda e: e.key)

    @classmethod
    def merge(cls, shards: Iterable["PredictionLog"]) -> "PredictionLog":
        """Deterministic union of per-video shards."""
        return cls(entry for shard in shards for entry in shard)

    def __iter__(self) -> Iterator[PredictionEntry]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PredictionLog) and self._entries == other._entries
