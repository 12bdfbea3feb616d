"""Synthetic episode generation."""

import numpy as np
import pytest

from src.dataset.domain.services.synthetic_generator import (
    SyntheticEpisodeGenerator,
    generate_episode,
    video_id_for,
)
from src.dataset.domain.value_objects.synth_config import SynthConfig
from src.shared.domain.exceptions.base import ValidationException

pytestmark = pytest.mark.unit


def test_same_seed_and_index_give_identical_episodes(tiny_synth_config):
    a = generate_episode(tiny_synth_config, 2)
    b = generate_episode(tiny_synth_config, 2)
    assert a == b
    assert a.features.tobytes() == b.features.tobytes()


def test_episode_does_not_depend_on_generation_order(tiny_synth_config):
    generator = SyntheticEpisodeGenerator(tiny_synth_config)
    everything = generator.generate()
    assert everything[3] == SyntheticEpisodeGenerator(tiny_synth_config).generate_episode(3)
    assert [r.video_id for r in everything] == [video_id_for(i) for i in range(4)]


def test_different_indices_differ(tiny_synth_config):
    a = generate_episode(tiny_synth_config, 0)
    b = generate_episode(tiny_synth_config, 1)
    assert not np.array_equal(a.features, b.features)


def test_noise_free_detections_hold_exactly_the_noun():
    config = SynthConfig(num_videos=3, snippets_per_video=30, detection_noise=0.0, seed=5)
    generator = SyntheticEpisodeGenerator(config)
    for index in range(config.num_videos):
        record = generator.generate_episode(index)
        for label, dets in zip(record.labels, record.detections):
            categories = [d.category_id for d in dets.detections]
            if label.background:
                assert categories == []
            else:
                assert categories == [label.noun - 1]
                assert 0.7 <= dets.detections[0].confidence <= 1.0


def test_labels_are_consistent(tiny_synth_config):
    record = generate_episode(tiny_synth_config, 0)
    assert record.num_snippets == tiny_synth_config.snippets_per_video
    assert record.feature_dim == tiny_synth_config.feature_dim
    for label in record.labels:
        if not label.background:
            assert label.action == tiny_synth_config.action_id(label.verb, label.noun)
            assert 1 <= label.verb <= tiny_synth_config.num_verbs


def test_features_follow_the_verb():
    config = SynthConfig(num_videos=1, snippets_per_video=40, feature_noise_sigma=0.0, seed=9)
    record = generate_episode(config, 0)
    by_verb: dict[int, set[bytes]] = {}
    for label, row in zip(record.labels, record.features):
        by_verb.setdefault(label.verb, set()).add(row.tobytes())
    assert all(len(rows) == 1 for rows in by_verb.values())


class TestSynthConfig:
    def test_head_sizes_include_background(self):
        sizes = SynthConfig(num_verbs=8, num_nouns=12).head_sizes()
        assert (sizes.verb, sizes.noun, sizes.action) == (9, 13, 97)

    def test_action_ids_are_dense(self):
        config = SynthConfig(num_verbs=2, num_nouns=3, object_categories=3)
        ids = [config.action_id(v, n) for v in (1, 2) for n in (1, 2, 3)]
        assert ids == [1, 2, 3, 4, 5, 6]

    def test_categories_must_cover_nouns(self):
        with pytest.raises(ValidationException):
            SynthConfig(num_nouns=12, object_categories=10)

    def test_noise_bounds(self):
        with pytest.raises(ValidationException):
            SynthConfig(detection_noise=1.5)
