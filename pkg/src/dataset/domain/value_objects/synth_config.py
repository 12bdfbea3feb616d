# src/dataset/domain/value_objects/synth_config.py
"""Synthetic dataset configuration value object."""

from src.heads.domain.value_objects.label_triple import HeadSizes
from src.shared.domain.exceptions.base import ValidationException
from src.shared.domain.value_objects.base import ValueObject


class SynthConfig(ValueObject):
    """Parameters of the synthetic episode generator.

    Verbs live in the features, nouns live in the detections; noun ``n`` is
    seen as object category ``n - 1``.
    """

    def __init__(
        self,
        num_videos: int = 200,
        snippets_per_video: int = 64,
        feature_dim: int = 32,
        num_verbs: int = 8,
        num_nouns: int = 12,
        object_categories: int = 12,
        detection_noise: float = 0.2,
        feature_noise_sigma: float = 0.5,
        seed: int = 7,
        segment_min_length: int = 4,
        segment_max_length: int = 12,
        gap_min_length: int = 1,
        gap_max_length: int = 6,
    ):
        counts = {
            "num_videos": num_videos,
            "snippets_per_video": snippets_per_video,
            "feature_dim": feature_dim,
            "num_verbs": num_verbs,
            "num_nouns": num_nouns,
            "object_categories": object_categories,
            "segment_min_length": segment_min_length,
            "gap_min_length": gap_min_length,
        }
        for name, value in counts.items():
            if value < 1:
                raise ValidationException(f"{name} must be at least 1, got {value}")
        if object_categories < num_nouns:
            raise ValidationException(
                f"object_categories ({object_categories}) must cover every noun ({num_nouns})"
            )
        if not 0.0 <= detection_noise <= 1.0:
            raise ValidationException(f"detection_noise must lie in [0, 1], got {detection_noise}")
        if feature_noise_sigma < 0:
            raise ValidationException(f"feature_noise_sigma must be non-negative, got {feature_noise_sigma}")
        if segment_max_length < segment_min_length or gap_max_length < gap_min_length:
            raise ValidationException("Maximum segment/gap lengths must not be below the minimums")

        self.num_videos = num_videos
        self.snippets_per_video = snippets_per_video
        self.feature_dim = feature_dim
        self.num_verbs = num_verbs
        self.num_nouns = num_nouns
        self.object_categories = object_categories
        self.detection_noise = float(detection_noise)
        self.feature_noise_sigma = float(feature_noise_sigma)
        self.seed = int(seed)
        self.segment_min_length = segment_min_length
        self.segment_max_length = segment_max_length
        self.gap_min_length = gap_min_length
        self.gap_max_length = gap_max_length

    @property
    def num_actions(self) -> int:
        return self.num_verbs * self.num_nouns

    def head_sizes(self) -> HeadSizes:
        """Class counts including the background slot."""
        return HeadSizes(self.num_verbs + 1, self.num_nouns + 1, self.num_actions + 1)

    def action_id(self, verb: int, noun: int) -> int:
        """Composite id of a verb-noun pair (both 1-based)."""
        return 1 + (verb - 1) * self.num_nouns + (noun - 1)
