# tests/conftest.py
"""Shared fixtures: tiny configurations and a generated dataset."""

from pathlib import Path
from typing import Any, Callable, Iterator

import numpy as np
import pytest

from src.dataset.application.services.dataset_application_service import DatasetApplicationService
from src.dataset.domain.value_objects.synth_config import SynthConfig
from src.heads.domain.value_objects.label_triple import HeadSizes
from src.numeric.domain.entities.tensor import precision
from src.oam.domain.value_objects.oa_config import OAConfig
from src.pipeline.application.dto.run_config_dto import RunConfig, build_run_config
from src.pipeline.domain.value_objects.detector_spec import DetectorSpec

TINY_SYNTH: dict[str, Any] = {
    "num_videos": 4,
    "snippets_per_video": 10,
    "feature_dim": 6,
    "num_verbs": 5,
    "num_nouns": 5,
    "object_categories": 5,
    "detection_noise": 0.2,
    "feature_noise_sigma": 0.5,
    "seed": 3,
    "segment_min_length": 2,
    "segment_max_length": 4,
    "gap_min_length": 1,
    "gap_max_length": 2,
    "val_fraction": 0.5,
}

TINY_MODEL: dict[str, Any] = {
    "feature_dim": 6,
    "hidden_dim": 8,
    "num_categories": 5,
    "object_input_dim": 3,
    "num_queries": 4,
    "embed_dim": 8,
    "num_heads": 2,
    "ffn_mult": 2,
    "cue_length": 4,
    "head_sizes": {"verb": 6, "noun": 6, "action": 26},
}


def tiny_config_dict(**sections: dict[str, Any]) -> dict[str, Any]:
    """Raw config of a model and dataset small enough for end-to-end tests."""
    raw: dict[str, Any] = {
        "model": dict(TINY_MODEL),
        "train": {"steps": 3, "chunk_length": 3, "log_every": 2, "seed": 11},
        "data": {"synth": dict(TINY_SYNTH)},
    }
    for name, values in sections.items():
        raw.setdefault(name, {}).update(values)
    return raw


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def float64() -> Iterator[None]:
    with precision("float64"):
        yield


@pytest.fixture
def tiny_config() -> RunConfig:
    return build_run_config(tiny_config_dict())


@pytest.fixture
def tiny_synth_config() -> SynthConfig:
    params = {k: v for k, v in TINY_SYNTH.items() if k != "val_fraction"}
    return SynthConfig(**params)


@pytest.fixture
def tiny_spec() -> DetectorSpec:
    return DetectorSpec(
        integration="oa_module",
        feature_dim=6,
        hidden_dim=8,
        num_categories=5,
        oa_config=OAConfig(num_queries=4, embed_dim=8, num_heads=2, ffn_mult=2),
        head_sizes=HeadSizes(6, 6, 26),
        cue_length=4,
        object_input_dim=3,
    )


@pytest.fixture
def dataset_root(tmp_path: Path, tiny_synth_config: SynthConfig) -> Path:
    root = tmp_path / "data"
    DatasetApplicationService(root).generate(tiny_synth_config, val_fraction=0.5)
    return root


@pytest.fixture
def make_config() -> Callable[..., RunConfig]:
    """``make_config(train={"steps": 0})`` merges sections into the tiny config."""

    def _make(**sections: dict[str, Any]) -> RunConfig:
        return build_run_config(tiny_config_dict(**sections))

    return _make
