"""Streaming inference and the finite-difference gradient check."""

import io
import json
from pathlib import Path

import numpy as np
import pytest

from src.dataset.application.services.dataset_application_service import DatasetApplicationService
from src.encoder.infrastructure.repositories.oadf_feature_repository import OadfFeatureRepository
from src.numeric.domain.services.random import SeedStream
from src.pipeline.application.dto.run_config_dto import build_run_config
from src.pipeline.application.services.detector_factory import read_checkpoint_config, restore_detector
from src.pipeline.application.services.evaluation_application_service import predict_video
from src.pipeline.application.services.gradcheck_application_service import (
    GRADCHECK_REPORT_FILE,
    GradientCheckApplicationService,
    tiny_spec,
)
from src.pipeline.application.services.streaming_application_service import StreamingApplicationService
from src.pipeline.application.services.training_application_service import TrainingApplicationService
from src.pipeline.domain.entities.action_detector import ActionDetector
from src.shared.domain.exceptions.base import DimensionException, GradientMismatchException
from src.shared.infrastructure.monitoring.metrics import REGISTRY

pytestmark = pytest.mark.integration

VIDEO = "video_00002"


@pytest.fixture
def checkpoint(tiny_config, dataset_root, tmp_path) -> Path:
    return Path(TrainingApplicationService(tmp_path / "run").train(tiny_config, dataset_root).checkpoint)


@pytest.fixture
def features_path(dataset_root) -> Path:
    return dataset_root / "val" / "features" / f"{VIDEO}.oadf"


@pytest.fixture
def detections_path(dataset_root) -> Path:
    return dataset_root / "val" / "detections.jsonl"


def stream(checkpoint: Path, features: Path, detections: Path | None = None) -> list[dict]:
    sink = io.StringIO()
    count = StreamingApplicationService(sink).stream(checkpoint, features, detections)
    lines = [json.loads(line) for line in sink.getvalue().splitlines()]
    assert len(lines) == count
    return lines


def missing_detections() -> float:
    return REGISTRY.get_sample_value("oad_missing_detections_total", {"command": "stream"}) or 0.0


class TestStreaming:
    def test_one_line_per_snippet(self, checkpoint, features_path, detections_path):
        lines = stream(checkpoint, features_path, detections_path)
        assert [line["snippet_index"] for line in lines] == list(range(10))
        assert list(lines[0]) == ["snippet_index", "verb_top5", "noun_top5", "action_top5"]
        assert all(len(line["noun_top5"]) == 5 and 0 not in line["noun_top5"] for line in lines)

    def test_matches_the_evaluation_pass(self, checkpoint, features_path, detections_path, dataset_root):
        lines = stream(checkpoint, features_path, detections_path)

        config, stored = read_checkpoint_config(checkpoint)
        detector = restore_detector(config, stored)
        record = next(
            r for r in DatasetApplicationService(dataset_root).load_split(dataset_root, "val")
            if r.video_id == VIDEO
        )
        for line, entry in zip(lines, predict_video(detector, record)):
            assert line["verb_top5"] == list(entry.verb_top5)
            assert line["noun_top5"] == list(entry.noun_top5)
            assert line["action_top5"] == list(entry.action_top5)

    def test_truncated_stream_repeats_the_prefix(
        self, checkpoint, features_path, detections_path, tmp_path
    ):
        repository = OadfFeatureRepository()
        truncated = tmp_path / "prefix" / f"{VIDEO}.oadf"
        repository.write(truncated, repository.read(features_path)[:4])

        full = stream(checkpoint, features_path, detections_path)
        assert stream(checkpoint, truncated, detections_path) == full[:4]

    @pytest.mark.parametrize("seed", range(20))
    def test_random_checkpoints_stay_causal(self, seed, make_config, dataset_root, detections_path, tmp_path):
        rng = np.random.default_rng(seed)
        config = make_config(
            model={
                "integration": ["none", "input_concat", "oa_module"][seed % 3],
                "positional_encoding": bool(rng.integers(2)),
            },
            train={"steps": int(rng.integers(0, 5)), "seed": seed},
        )
        checkpoint = Path(TrainingApplicationService(tmp_path / "run").train(config, dataset_root).checkpoint)

        video = ["video_00002", "video_00003"][int(rng.integers(2))]
        features = dataset_root / "val" / "features" / f"{video}.oadf"
        k = int(rng.integers(1, 10))
        repository = OadfFeatureRepository()
        truncated = tmp_path / "prefix" / f"{video}.oadf"
        repository.write(truncated, repository.read(features)[:k])

        full = stream(checkpoint, features, detections_path)
        assert stream(checkpoint, truncated, detections_path) == full[:k]

    def test_reads_snippets_one_at_a_time(self, checkpoint, features_path, mocker):
        repository = OadfFeatureRepository()
        whole = mocker.spy(repository, "read")
        lazy = mocker.spy(repository, "iter_snippets")

        count = StreamingApplicationService(io.StringIO(), features=repository).stream(checkpoint, features_path)
        assert count == 10
        whole.assert_not_called()
        lazy.assert_called_once_with(features_path)

    def test_missing_detections_still_predict(self, checkpoint, features_path):
        before = missing_detections()
        lines = stream(checkpoint, features_path)
        assert len(lines) == 10
        assert missing_detections() - before == 10

    def test_empty_file_writes_nothing(self, checkpoint, tmp_path):
        empty = tmp_path / "empty.oadf"
        empty.write_bytes(b"")
        assert stream(checkpoint, empty) == []

    def test_zero_snippet_file_writes_nothing(self, checkpoint, tmp_path):
        path = tmp_path / "none.oadf"
        OadfFeatureRepository().write(path, np.zeros((0, 6), dtype=np.float32))
        assert stream(checkpoint, path) == []

    def test_feature_width_mismatch(self, checkpoint, tmp_path):
        path = tmp_path / "wide.oadf"
        OadfFeatureRepository().write(path, np.zeros((3, 7), dtype=np.float32))
        with pytest.raises(DimensionException, match="D=7"):
            stream(checkpoint, path)


class TestGradientCheck:
    @pytest.fixture(scope="class")
    def default_report(self):
        return GradientCheckApplicationService().run(build_run_config({}))

    def test_default_check_passes(self, default_report):
        assert default_report.passed
        groups = {g.group for g in default_report.groups}
        assert {"oa_module/encoder", "oa_module/heads", "oa_module/oam.query_set"} <= groups
        assert {"input_concat/object_input", "input_concat/encoder"} <= groups
        GradientCheckApplicationService.ensure_passed(default_report)

    def test_default_check_covers_every_entry(self, default_report):
        section = build_run_config({}).gradcheck
        assert section.max_entries is None
        for mode in section.modes:
            detector = ActionDetector(tiny_spec(section, mode), SeedStream(0))
            expected = sum(p.size for _, p in detector.named_parameters())
            checked = sum(g.entries_checked for g in default_report.groups if g.group.startswith(f"{mode}/"))
            assert checked == expected

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
    def test_other_seeds_pass(self, seed):
        report = GradientCheckApplicationService().run(build_run_config({"gradcheck": {"seed": seed}}))
        assert report.passed, [(g.group, g.max_relative_error) for g in report.groups if not g.passed]

    def test_corrupted_group_is_reported(self, tmp_path):
        config = build_run_config({"gradcheck": {"modes": ["input_concat"], "max_entries": 8}})
        service = GradientCheckApplicationService(tmp_path)
        report = service.run(config, corrupt_group="heads")

        assert report.failing_groups == ["input_concat/heads"]
        with pytest.raises(GradientMismatchException, match="input_concat/heads"):
            service.ensure_passed(report)
        written = json.loads((tmp_path / GRADCHECK_REPORT_FILE).read_text())
        assert [g["group"] for g in written["groups"] if not g["passed"]] == ["input_concat/heads"]

    def test_same_seed_same_report(self):
        config = build_run_config({"gradcheck": {"modes": ["none"], "seed": 5, "max_entries": 8}})
        assert GradientCheckApplicationService().run(config) == GradientCheckApplicationService().run(config)
