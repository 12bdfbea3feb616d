# src/pipeline/application/dto/run_config_dto.py
"""Run configuration DTOs."""

import json
from pathlib import Path
from typing import Any, Literal, Optional, Sequence

from pydantic import Field, ValidationError, model_validator

from src.dataset.domain.value_objects.synth_config import SynthConfig
from src.heads.domain.value_objects.label_triple import HeadSizes
from src.oam.domain.value_objects.oa_config import OAConfig
from src.pipeline.domain.value_objects.detector_spec import DetectorSpec
from src.shared.application.dto.base import ConfigDTO
from src.shared.domain.exceptions.base import ConfigException, DomainException

IntegrationName = Literal["none", "input_concat", "oa_module"]


class NumericSectionDTO(ConfigDTO):
    """Storage precision of the tensor engine."""
    dtype: Literal["float32", "float64"] = "float32"


class HeadSizesDTO(ConfigDTO):
    """Class counts per head, background slot included."""
    verb: int = Field(default=9, ge=6, description="Top-5 needs five non-background classes")
    noun: int = Field(default=13, ge=6)
    action: int = Field(default=97, ge=6)

    def to_value_object(self) -> HeadSizes:
        return HeadSizes(self.verb, self.noun, self.action)


class ModelSectionDTO(ConfigDTO):
    """Detector architecture."""
    integration: IntegrationName = "oa_module"
    feature_dim: int = Field(default=32, ge=1, description="D")
    hidden_dim: int = Field(default=32, ge=1, description="H")
    num_categories: int = Field(default=12, ge=1, description="C")
    object_input_dim: int = Field(default=16, ge=1, description="D' of input_concat")

    num_queries: int = Field(default=16, ge=1)
    embed_dim: int = Field(default=32, ge=1)
    num_heads: int = Field(default=4, ge=1)
    ffn_mult: int = Field(default=4, ge=1)
    num_blocks: int = Field(default=1, ge=1)
    self_attention: bool = True
    positional_encoding: bool = False
    zero_init_outputs: bool = True

    cues: Literal["last_k", "final"] = "last_k"
    cue_length: int = Field(default=16, ge=1, description="L")
    aggregation: Literal["max", "sum", "mean"] = "max"
    head_sizes: HeadSizesDTO = Field(default_factory=HeadSizesDTO)
    loss_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)

    @model_validator(mode="after")
    def check_dimensions(self) -> "ModelSectionDTO":
        if self.embed_dim % self.num_heads != 0:
            raise ValueError(
                f"model.embed_dim ({self.embed_dim}) must be divisible by model.num_heads ({self.num_heads})"
            )
        if self.integration == "oa_module" and self.hidden_dim != self.embed_dim:
            raise ValueError(
                f"model.hidden_dim ({self.hidden_dim}) must equal model.embed_dim "
                f"({self.embed_dim}) in oa_module mode"
            )
        if any(w < 0 for w in self.loss_weights):
            raise ValueError("model.loss_weights must be non-negative")
        return self

    def to_oa_config(self) -> OAConfig:
        return OAConfig(
            num_queries=self.num_queries,
            embed_dim=self.embed_dim,
            num_heads=self.num_heads,
            ffn_mult=self.ffn_mult,
            num_blocks=self.num_blocks,
            self_attention=self.self_attention,
            positional_encoding=self.positional_encoding,
            zero_init_outputs=self.zero_init_outputs,
        )

    def to_detector_spec(self) -> DetectorSpec:
        return DetectorSpec(
            integration=self.integration,
            feature_dim=self.feature_dim,
            hidden_dim=self.hidden_dim,
            num_categories=self.num_categories,
            oa_config=self.to_oa_config(),
            head_sizes=self.head_sizes.to_value_object(),
            cue_mode=self.cues,
            cue_length=self.cue_length,
            object_input_dim=self.object_input_dim,
            aggregation=self.aggregation,
            loss_weights=self.loss_weights,
        )


class TrainSectionDTO(ConfigDTO):
    """Optimizer and sampling settings."""
    lr: float = Field(default=3e-3, gt=0.0)
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = Field(default=1e-8, gt=0.0)
    steps: int = Field(default=2000, ge=0)
    batch_size: int = Field(default=1, ge=1, description="Sequence samples per accumulation step")
    grad_accum_steps: int = Field(default=1, ge=1)
    chunk_length: int = Field(default=8, ge=1, description="Supervised snippets at the end of a sample")
    log_every: int = Field(default=50, ge=1)
    seed: int = Field(default=7, ge=0)

    @model_validator(mode="after")
    def check_betas(self) -> "TrainSectionDTO":
        if not all(0.0 <= b < 1.0 for b in self.betas):
            raise ValueError(f"train.betas must lie in [0, 1), got {self.betas}")
        return self


class SynthSectionDTO(ConfigDTO):
    """Synthetic dataset generator settings."""
    num_videos: int = Field(default=200, ge=1)
    snippets_per_video: int = Field(default=64, ge=1)
    feature_dim: int = Field(default=32, ge=1)
    num_verbs: int = Field(default=8, ge=1)
    num_nouns: int = Field(default=12, ge=1)
    object_categories: int = Field(default=12, ge=1)
    detection_noise: float = Field(default=0.2, ge=0.0, le=1.0)
    feature_noise_sigma: float = Field(default=0.5, ge=0.0)
    seed: int = Field(default=7, ge=0)
    segment_min_length: int = Field(default=4, ge=1)
    segment_max_length: int = Field(default=12, ge=1)
    gap_min_length: int = Field(default=1, ge=1)
    gap_max_length: int = Field(default=6, ge=1)
    val_fraction: float = Field(default=0.2, ge=0.0, lt=1.0)

    def to_value_object(self) -> SynthConfig:
        return SynthConfig(**self.model_dump(exclude={"val_fraction"}))


class DataSectionDTO(ConfigDTO):
    """Where datasets live."""
    root: Optional[str] = Field(default=None, description="Dataset directory; defaults to --out")
    train_split: str = "train"
    eval_split: str = "val"
    synth: SynthSectionDTO = Field(default_factory=SynthSectionDTO)


class EvalSectionDTO(ConfigDTO):
    """Evaluation outputs."""
    report_path: str = "report.json"
    workers: int = Field(default=1, ge=1)
    per_class: bool = False


class GradcheckSectionDTO(ConfigDTO):
    """Tiny model used for finite-difference checks."""
    modes: list[IntegrationName] = Field(default_factory=lambda: ["oa_module", "input_concat"])
    num_queries: int = Field(default=4, ge=1)
    embed_dim: int = Field(default=8, ge=1)
    num_heads: int = Field(default=2, ge=1)
    hidden_dim: int = Field(default=8, ge=1)
    feature_dim: int = Field(default=6, ge=1)
    num_categories: int = Field(default=5, ge=1)
    cue_length: int = Field(default=4, ge=1)
    object_input_dim: int = Field(default=3, ge=1)
    num_snippets: int = Field(default=5, ge=1)
    head_sizes: tuple[int, int, int] = (4, 5, 6)
    step: float = Field(default=1e-5, gt=0.0)
    tolerance: float = Field(default=1e-4, gt=0.0)
    max_entries: Optional[int] = Field(
        default=None, ge=1, description="Random entries per parameter tensor; every entry when unset"
    )
    init_std: float = Field(default=0.5, gt=0.0)
    seed: int = Field(default=0, ge=0)


class RunConfig(ConfigDTO):
    """Complete configuration of one command run."""
    numeric: NumericSectionDTO = Field(default_factory=NumericSectionDTO)
    model: ModelSectionDTO = Field(default_factory=ModelSectionDTO)
    train: TrainSectionDTO = Field(default_factory=TrainSectionDTO)
    data: DataSectionDTO = Field(default_factory=DataSectionDTO)
    eval: EvalSectionDTO = Field(default_factory=EvalSectionDTO)
    gradcheck: GradcheckSectionDTO = Field(default_factory=GradcheckSectionDTO)


def _describe(error: ValidationError) -> str:
    details = error.errors()[0]
    key = ".".join(str(part) for part in details["loc"])
    if key:
        return f"Invalid configuration key '{key}': {details['msg']}"
    return f"Invalid configuration: {details['msg']}"


def parse_override(assignment: str) -> tuple[list[str], Any]:
    """Split ``a.b.c=value``; the value is JSON when it parses, else a string."""
    key, sep, raw = assignment.partition("=")
    if not sep or not key.strip():
        raise ConfigException(f"Override must look like key=value, got '{assignment}'")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip().split("."), value


def apply_override(tree: dict[str, Any], path: list[str], value: Any) -> None:
    node = tree
    for part in path[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigException(f"Cannot set '{'.'.join(path)}': '{part}' is not a section")
        node = child
    node[path[-1]] = value


def build_run_config(raw: dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigException(_describe(e)) from e
    except DomainException as e:
        raise ConfigException(e.message) from e


def load_run_config(
    path: Optional[Path] = None,
    overrides: Sequence[str] = (),
    seed: Optional[int] = None,
) -> RunConfig:
    """Defaults, then the JSON file, then ``--set`` overrides, then ``--seed``."""
    raw: dict[str, Any] = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError as e:
            raise ConfigException(f"Config file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigException(f"Config file {path} is not valid JSON: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigException(f"Config file {path} must hold a JSON object")

    for assignment in overrides:
        key_path, value = parse_override(assignment)
        apply_override(raw, key_path, value)

    if seed is not None:
        apply_override(raw, ["train", "seed"], seed)
        apply_override(raw, ["data", "synth", "seed"], seed)
        apply_override(raw, ["gradcheck", "seed"], seed)

    return build_run_config(raw)
