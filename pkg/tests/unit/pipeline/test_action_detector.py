"""Detector assembly across the three integration modes."""

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from src.encoder.domain.value_objects.feature_snippet import FeatureSnippet
from src.heads.domain.value_objects.label_triple import HeadSizes, LabelTriple
from src.numeric.domain.services.random import SeedStream
from src.oam.domain.value_objects.oa_config import OAConfig
from src.objects.domain.value_objects.detection import Detection, ObjectScoreVector, SnippetDetections
from src.pipeline.application.services.gradcheck_application_service import parameter_group
from src.pipeline.domain.entities.action_detector import ActionDetector
from src.pipeline.domain.value_objects.detector_spec import DetectorSpec
from src.shared.domain.exceptions.base import DimensionException, ValidationException

pytestmark = pytest.mark.unit


def make_spec(integration: str, **overrides) -> DetectorSpec:
    params = {
        "integration": integration,
        "feature_dim": 6,
        "hidden_dim": 8,
        "num_categories": 5,
        "oa_config": OAConfig(num_queries=4, embed_dim=8, num_heads=2, ffn_mult=2),
        "head_sizes": HeadSizes(6, 6, 26),
        "cue_length": 4,
        "object_input_dim": 3,
    }
    params.update(overrides)
    return DetectorSpec(**params)


def run(detector: ActionDetector, features: np.ndarray, scores: list[ObjectScoreVector]) -> list[np.ndarray]:
    state = detector.start()
    logits = []
    for t, (row, f) in enumerate(zip(features, scores)):
        outputs = detector.advance(state, FeatureSnippet("v", t, row), f)
        logits.append(outputs.noun_logits.numpy())
    return logits


@pytest.fixture
def episode(rng) -> tuple[np.ndarray, list[ObjectScoreVector]]:
    features = rng.normal(size=(6, 6))
    scores = [ObjectScoreVector(rng.uniform(size=5)) for _ in range(6)]
    return features, scores


class TestParameters:
    def test_mode_specific_components(self):
        stream = SeedStream(0)
        names = {
            mode: {name.split(".")[0] for name, _ in ActionDetector(make_spec(mode), stream).named_parameters()}
            for mode in ("none", "input_concat", "oa_module")
        }
        assert names["none"] == {"encoder", "state_projection", "heads"}
        assert names["input_concat"] == {"object_input", "encoder", "state_projection", "heads"}
        assert names["oa_module"] == {"encoder", "oam", "heads"}

    def test_input_concat_widens_the_encoder(self):
        detector = ActionDetector(make_spec("input_concat"), SeedStream(0))
        assert detector.encoder.w_z.shape == (6 + 3, 8)

    def test_parameter_groups(self):
        detector = ActionDetector(make_spec("oa_module"), SeedStream(0))
        groups = {parameter_group(name) for name, _ in detector.named_parameters()}
        assert {"encoder", "heads", "oam.query_set", "oam.object_projection", "oam.output_ffn"} <= groups

    def test_same_stream_same_weights(self):
        a = ActionDetector(make_spec("oa_module"), SeedStream(4).split("model"))
        b = ActionDetector(make_spec("oa_module"), SeedStream(4).split("model"))
        for (_, pa), (_, pb) in zip(a.named_parameters(), b.named_parameters()):
            assert_array_equal(pa.data, pb.data)

    def test_oa_module_needs_matching_widths(self):
        with pytest.raises(ValidationException):
            make_spec("oa_module", hidden_dim=6)


class TestAdvance:
    def test_oa_module_is_object_blind_at_initialization(self, episode):
        features, scores = episode
        detector = ActionDetector(make_spec("oa_module"), SeedStream(0))
        blank = [ObjectScoreVector.zeros(5)] * len(scores)
        for a, b in zip(run(detector, features, scores), run(detector, features, blank)):
            assert_array_equal(a, b)

    def test_input_concat_sees_objects(self, episode):
        features, scores = episode
        detector = ActionDetector(make_spec("input_concat"), SeedStream(0))
        blank = [ObjectScoreVector.zeros(5)] * len(scores)
        assert not np.array_equal(run(detector, features, scores)[-1], run(detector, features, blank)[-1])

    @pytest.mark.parametrize("mode", ["none", "input_concat", "oa_module"])
    def test_future_snippets_do_not_change_past_outputs(self, mode, episode, rng):
        features, scores = episode
        detector = ActionDetector(make_spec(mode), SeedStream(0))
        altered = features.copy()
        altered[4:] = rng.normal(size=(2, 6))
        original = run(detector, features, scores)
        changed = run(detector, altered, scores)
        for t in range(4):
            assert_array_equal(original[t], changed[t])

    def test_final_cue_mode_keeps_one_cue(self, episode):
        features, scores = episode
        detector = ActionDetector(make_spec("oa_module", cue_mode="final"), SeedStream(0))
        state = detector.start()
        for t in range(3):
            detector.advance(state, FeatureSnippet("v", t, features[t]), scores[t])
        assert len(state.cues) == 1

    def test_silent_steps_still_advance_state(self, episode):
        features, scores = episode
        detector = ActionDetector(make_spec("none"), SeedStream(0))
        state = detector.start()
        assert detector.advance(state, FeatureSnippet("v", 0, features[0]), scores[0], emit=False) is None
        assert state.encoder.t == 1

    def test_feature_dimension_mismatch(self):
        detector = ActionDetector(make_spec("none"), SeedStream(0))
        with pytest.raises(DimensionException):
            detector.advance(detector.start(), FeatureSnippet("v", 0, np.zeros(4)), ObjectScoreVector.zeros(5))

    def test_category_mismatch(self):
        detector = ActionDetector(make_spec("none"), SeedStream(0))
        with pytest.raises(DimensionException):
            detector.advance(detector.start(), FeatureSnippet("v", 0, np.zeros(6)), ObjectScoreVector.zeros(3))

    def test_object_scores_of_missing_and_present_detections(self):
        detector = ActionDetector(make_spec("none"), SeedStream(0))
        assert_array_equal(detector.object_scores(None).scores, np.zeros((1, 5)))
        dets = SnippetDetections("v", 0, [Detection(4, 0.75)])
        assert detector.object_scores(dets).scores[0, 4] == 0.75

    def test_loss_is_finite(self, episode):
        features, scores = episode
        detector = ActionDetector(make_spec("oa_module"), SeedStream(0))
        outputs = detector.advance(detector.start(), FeatureSnippet("v", 0, features[0]), scores[0])
        assert np.isfinite(detector.loss(outputs, LabelTriple(2, 3, 9)).item())
