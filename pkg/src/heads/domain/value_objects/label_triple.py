# src/heads/domain/value_objects/label_triple.py
"""Label and head-output value objects."""

from dataclasses import dataclass

from src.numeric.domain.entities.tensor import Tensor
from src.shared.domain.exceptions.base import ValidationException
from src.shared.domain.value_objects.base import ValueObject

BACKGROUND = 0
HEADS = ("verb", "noun", "action")


class LabelTriple(ValueObject):
    """Ground truth of one snippet; index 0 of every head is background."""

    def __init__(self, verb: int, noun: int, action: int, background: bool = False):
        ids = (int(verb), int(noun), int(action))
        if background and ids != (BACKGROUND, BACKGROUND, BACKGROUND):
            raise ValidationException(f"Background label must use id 0 in every head, got {ids}")
        if not background and min(ids) <= BACKGROUND:
            raise ValidationException(f"Action label ids must be positive, got {ids}")

        self.verb, self.noun, self.action = ids
        self.background = bool(background)

    @classmethod
    def background_label(cls) -> "LabelTriple":
        return cls(BACKGROUND, BACKGROUND, BACKGROUND, background=True)

    def for_head(self, head: str) -> int:
        if head not in HEADS:
            raise ValidationException(f"Unknown head: {head}. Expected one of {HEADS}")
        return int(getattr(self, head))


class HeadSizes(ValueObject):
    """Class counts per head, background slot included."""

    def __init__(self, verb: int, noun: int, action: int):
        if min(verb, noun, action) < 2:
            raise ValidationException(
                f"Every head needs background plus at least one class, got {(verb, noun, action)}"
            )
        self.verb = verb
        self.noun = noun
        self.action = action

    def for_head(self, head: str) -> int:
        return int(getattr(self, head))


@dataclass(frozen=True)
class HeadOutputs:
    """Logits of the three classifiers."""

    verb_logits: Tensor
    noun_logits: Tensor
    action_logits: Tensor

    def for_head(self, head: str) -> Tensor:
        return getattr(self, f"{head}_logits")
