# src/dataset/domain/services/synthetic_generator.py
"""Synthetic episodes with verbs planted in features and nouns planted in detections."""

import numpy as np

from src.dataset.domain.value_objects.episode_record import EpisodeRecord
from src.dataset.domain.value_objects.synth_config import SynthConfig
from src.heads.domain.value_objects.label_triple import LabelTriple
from src.numeric.domain.services.random import SeedStream
from src.objects.domain.value_objects.detection import Detection, SnippetDetections

TARGET_CONFIDENCE = (0.7, 1.0)
DISTRACTOR_CONFIDENCE = (0.05, 0.7)


def video_id_for(index: int) -> str:
    return f"video_{index:05d}"


class SyntheticEpisodeGenerator:
    """Generates episode ``index`` as a pure function of ``(seed, index)``."""

    def __init__(self, config: SynthConfig):
        self.config = config
        self.stream = SeedStream(config.seed).split("dataset")
        # Row 0 is the background cluster.
        self.verb_centroids = self.stream.split("verb-centroids").generator().normal(
            0.0, 1.0, (config.num_verbs + 1, config.feature_dim)
        )

    def sample_labels(self, rng: np.random.Generator) -> list[LabelTriple]:
        """Background gaps alternating with verb-noun segments."""
        cfg = self.config
        labels: list[LabelTriple] = []
        while len(labels) < cfg.snippets_per_video:
            gap = int(rng.integers(cfg.gap_min_length, cfg.gap_max_length + 1))
            labels.extend(LabelTriple.background_label() for _ in range(gap))

            length = int(rng.integers(cfg.segment_min_length, cfg.segment_max_length + 1))
            verb = int(rng.integers(1, cfg.num_verbs + 1))
            noun = int(rng.integers(1, cfg.num_nouns + 1))
            action = cfg.action_id(verb, noun)
            labels.extend(LabelTriple(verb, noun, action) for _ in range(length))
        return labels[: cfg.snippets_per_video]

    def sample_features(self, labels: list[LabelTriple], rng: np.random.Generator) -> np.ndarray:
        verbs = np.array([label.verb for label in labels], dtype=np.int64)
        noise = rng.normal(0.0, 1.0, (len(labels), self.config.feature_dim))
        return (self.verb_centroids[verbs] + self.config.feature_noise_sigma * noise).astype(np.float32)

    def sample_detections(
        self, video_id: str, snippet_index: int, label: LabelTriple, rng: np.random.Generator
    ) -> SnippetDetections:
        cfg = self.config
        target = None if label.background else label.noun - 1

        # Same draws for every snippet, whatever the label.
        distractor_draw = rng.random(cfg.object_categories)
        distractor_conf = rng.uniform(*DISTRACTOR_CONFIDENCE, cfg.object_categories)
        target_conf = rng.uniform(*TARGET_CONFIDENCE)
        corners = rng.uniform(0.0, 0.5, (cfg.object_categories, 2))
        extents = rng.uniform(0.1, 0.5, (cfg.object_categories, 2))

        detections = []
        for c in range(cfg.object_categories):
            if c == target:
                confidence = float(target_conf)
            elif distractor_draw[c] < cfg.detection_noise:
                confidence = float(distractor_conf[c])
            else:
                continue
            x1, y1 = (float(v) for v in corners[c])
            x2, y2 = (float(v) for v in corners[c] + extents[c])
            detections.append(Detection(c, confidence, (x1, y1, x2, y2)))

        return SnippetDetections(video_id, snippet_index, detections)

    def generate_episode(self, index: int) -> EpisodeRecord:
        rng = self.stream.split("episode", index).generator()
        video_id = video_id_for(index)

        labels = self.sample_labels(rng)
        features = self.sample_features(labels, rng)
        detections = [
            self.sample_detections(video_id, t, label, rng) for t, label in enumerate(labels)
        ]
        return EpisodeRecord(video_id, features, detections, labels)

    def generate(self) -> list[EpisodeRecord]:
        return [self.generate_episode(i) for i in range(self.config.num_videos)]


def generate_episode(config: SynthConfig, index: int) -> EpisodeRecord:
    return SyntheticEpisodeGenerator(config).generate_episode(index)
