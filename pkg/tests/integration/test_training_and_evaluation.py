"""Training, evaluation and ablation services on a generated dataset."""

import json
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from src.dataset.application.services.dataset_application_service import DatasetApplicationService
from src.numeric.domain.entities.tensor import Tensor
from src.pipeline.application.services.ablation_application_service import (
    ABLATION_FILE,
    AblationApplicationService,
)
from src.pipeline.application.services.detector_factory import build_detector, read_checkpoint_config
from src.pipeline.application.services.evaluation_application_service import (
    EvaluationApplicationService,
    predict_dataset,
)
from src.pipeline.application.services.training_application_service import (
    CHECKPOINT_FILE,
    TRAIN_LOG_FILE,
    TrainingApplicationService,
)
from src.pipeline.infrastructure.repositories.checkpoint_repository import load_checkpoint
from src.shared.domain.exceptions.base import ConfigException, DivergenceException

pytestmark = pytest.mark.integration


def train(config, dataset_root: Path, out_dir: Path):
    return TrainingApplicationService(out_dir).train(config, dataset_root)


class TestTraining:
    def test_writes_checkpoint_log_and_config(self, tiny_config, dataset_root, tmp_path):
        result = train(tiny_config, dataset_root, tmp_path / "run")

        assert Path(result.checkpoint) == tmp_path / "run" / CHECKPOINT_FILE
        assert (tmp_path / "run" / "config.json").is_file()
        lines = (tmp_path / "run" / TRAIN_LOG_FILE).read_text().splitlines()
        assert [json.loads(line)["step"] for line in lines] == [2, 3]
        assert set(json.loads(lines[0])) == {"step", "loss", "verb_loss", "noun_loss", "action_loss"}
        assert np.isfinite(result.final_loss)

    def test_same_seed_same_checkpoint_bytes(self, tiny_config, dataset_root, tmp_path):
        a = train(tiny_config, dataset_root, tmp_path / "a")
        b = train(tiny_config, dataset_root, tmp_path / "b")
        assert Path(a.checkpoint).read_bytes() == Path(b.checkpoint).read_bytes()

    def test_gradient_accumulation_runs(self, make_config, dataset_root, tmp_path):
        config = make_config(train={"steps": 2, "batch_size": 2, "grad_accum_steps": 2, "chunk_length": 2})
        assert np.isfinite(train(config, dataset_root, tmp_path / "run").final_loss)

    @pytest.mark.parametrize("integration", ["none", "input_concat"])
    def test_other_integration_modes_train(self, make_config, dataset_root, tmp_path, integration):
        config = make_config(model={"integration": integration})
        result = train(config, dataset_root, tmp_path / integration)
        restored, _ = read_checkpoint_config(Path(result.checkpoint))
        assert restored.model.integration == integration

    def test_zero_steps_store_the_initialization(self, make_config, dataset_root, tmp_path):
        config = make_config(train={"steps": 0})
        result = train(config, dataset_root, tmp_path / "run")

        stored = load_checkpoint(Path(result.checkpoint))
        for name, param in build_detector(config).named_parameters():
            assert_array_equal(stored.tensors[name], param.data)
        assert (tmp_path / "run" / TRAIN_LOG_FILE).read_text() == ""

    def test_feature_dim_mismatch_fails_before_training(self, make_config, dataset_root, tmp_path):
        config = make_config(model={"feature_dim": 7})
        with pytest.raises(ConfigException, match="model.feature_dim"):
            train(config, dataset_root, tmp_path / "run")
        assert not (tmp_path / "run" / CHECKPOINT_FILE).exists()

    def test_category_mismatch_fails_before_training(self, make_config, dataset_root, tmp_path):
        config = make_config(model={"num_categories": 7})
        with pytest.raises(ConfigException, match="num_categories"):
            train(config, dataset_root, tmp_path / "run")

    def test_non_finite_loss_stops_training(self, tiny_config, dataset_root, tmp_path, mocker):
        mocker.patch(
            "src.pipeline.application.services.training_application_service.sequence_loss",
            return_value=(Tensor(float("nan")), {"verb": 0.0, "noun": 0.0, "action": 0.0}),
        )
        with pytest.raises(DivergenceException, match="step 1"):
            train(tiny_config, dataset_root, tmp_path / "run")
        assert not (tmp_path / "run" / CHECKPOINT_FILE).exists()


class TestEvaluation:
    @pytest.fixture
    def checkpoint(self, tiny_config, dataset_root, tmp_path) -> Path:
        return Path(train(tiny_config, dataset_root, tmp_path / "run").checkpoint)

    def test_report_is_written_and_repeatable(self, checkpoint, dataset_root, tmp_path):
        service = EvaluationApplicationService(tmp_path / "eval")
        first = service.evaluate(checkpoint, dataset_root)
        second = service.evaluate(checkpoint, dataset_root)

        assert first == second
        for value in (first.verb, first.noun, first.action):
            assert 0.0 <= value <= 1.0
        assert first.num_snippets == 2 * 10
        written = json.loads((tmp_path / "eval" / "report.json").read_text())
        assert written["noun"] == first.noun
        assert "per_class" not in written

    def test_worker_threads_do_not_change_the_log(self, checkpoint, dataset_root):
        config, stored = read_checkpoint_config(checkpoint)
        detector = build_detector(config)
        stored.apply_to(detector)
        records = DatasetApplicationService(dataset_root).load_split(dataset_root, "val")
        assert predict_dataset(detector, records, workers=1) == predict_dataset(detector, records, workers=3)

    def test_per_class_report_carries_names(self, checkpoint, dataset_root, tmp_path, tiny_config):
        section = tiny_config.eval.model_copy(update={"per_class": True, "report_path": "detail.json"})
        report = EvaluationApplicationService(tmp_path / "eval").evaluate(
            checkpoint, dataset_root, section
        )
        assert all(row.name.startswith("noun_") for row in report.per_class["noun"])
        assert (tmp_path / "eval" / "detail.json").is_file()


class TestAblation:
    def test_runs_every_requested_mode(self, make_config, dataset_root, tmp_path):
        config = make_config(train={"steps": 1})
        table = AblationApplicationService(tmp_path / "ablation").run(
            config, dataset_root, ["none", "oa_module"]
        )

        assert [row.integration for row in table.rows] == ["none", "oa_module"]
        assert table.noun_chance == 1.0
        written = json.loads((tmp_path / "ablation" / ABLATION_FILE).read_text())
        assert [row["integration"] for row in written["rows"]] == ["none", "oa_module"]
        assert (tmp_path / "ablation" / "none" / CHECKPOINT_FILE).is_file()

        nouns = {row.integration: row.report.noun for row in table.rows}
        assert table.noun_margins == {"none": pytest.approx(nouns["oa_module"] - nouns["none"])}
        assert written["noun_margins"] == table.noun_margins

    def test_margins_need_the_object_aware_module(self, make_config, dataset_root, tmp_path):
        config = make_config(train={"steps": 0})
        table = AblationApplicationService(tmp_path).run(config, dataset_root, ["none", "input_concat"])
        assert table.noun_margins == {}
