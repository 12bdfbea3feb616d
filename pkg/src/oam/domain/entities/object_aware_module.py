# src/oam/domain/entities/object_aware_module.py
"""Object-aware module: learnable queries refined by object and temporal context."""

from dataclasses import dataclass

import numpy as np

from src.numeric.domain.entities.module import LayerNorm, Linear, Module
from src.numeric.domain.entities.tensor import Parameter, Tensor, get_default_dtype
from src.numeric.domain.services import ops
from src.oam.domain.entities.attention import DecoderLayer, FeedForward
from src.oam.domain.value_objects.oa_config import OAConfig
from src.objects.domain.value_objects.detection import ObjectScoreVector
from src.shared.domain.exceptions.base import DimensionException, EmptyContextException


@dataclass(frozen=True)
class ObjectToken:
    """Object scores projected to the query width, ``[M x d]``."""

    token: Tensor


def sinusoidal_positions(length: int, dim: int) -> np.ndarray:
    """Additive sinusoidal encodings, oldest cue at position 0."""
    positions = np.arange(length, dtype=np.float64)[:, None]
    rates = np.exp(-np.log(10000.0) * (np.arange(0, dim, 2, dtype=np.float64) / dim))
    table = np.zeros((length, dim), dtype=np.float64)
    table[:, 0::2] = np.sin(positions * rates)
    table[:, 1::2] = np.cos(positions * rates[: dim // 2])
    return table


class QuerySet(Module):
    """The ``N`` learnable query vectors."""

    def __init__(self, num_queries: int, dim: int, rng: np.random.Generator, std: float = 0.02):
        self.queries = Parameter(rng.normal(0.0, std, (num_queries, dim)), name="queries")


class ObjectProjection(Module):
    """Single affine layer from ``C`` object scores to the query width."""

    def __init__(self, num_categories: int, dim: int, rng: np.random.Generator):
        self.num_categories = num_categories
        self.linear = Linear(num_categories, dim, rng)

    def __call__(self, f: ObjectScoreVector | Tensor) -> ObjectToken:
        if isinstance(f, ObjectScoreVector):
            f = Tensor(f.scores)
        if f.ndim != 2 or f.shape[1] != self.num_categories:
            raise DimensionException(
                f"Object scores of shape {f.shape} do not match {self.num_categories} categories"
            )
        return ObjectToken(self.linear(f))


class ObjectAwareModule(Module):
    """Two decoder layers per block (object context, then temporal cues) and an output FFN."""

    def __init__(self, config: OAConfig, num_categories: int, rng: np.random.Generator):
        self.config = config
        d = config.embed_dim
        zero = config.zero_init_outputs

        self.query_set = QuerySet(config.num_queries, d, rng, config.query_init_std)
        self.object_projection = ObjectProjection(num_categories, d, rng)
        self.object_layers = [
            DecoderLayer(
                d, config.num_heads, config.ffn_mult, rng,
                config.self_attention, zero, config.layer_norm_eps,
            )
            for _ in range(config.num_blocks)
        ]
        self.temporal_layers = [
            DecoderLayer(
                d, config.num_heads, config.ffn_mult, rng,
                config.self_attention, zero, config.layer_norm_eps,
            )
            for _ in range(config.num_blocks)
        ]
        self.output_norm = LayerNorm(d, config.layer_norm_eps)
        self.output_ffn = FeedForward(d, config.ffn_mult, rng, zero)

    def project_objects(self, f: ObjectScoreVector | Tensor) -> ObjectToken:
        return self.object_projection(f)

    def __call__(self, f: ObjectScoreVector | Tensor, cues: Tensor) -> Tensor:
        """Refined queries ``[N x d]``."""
        if cues.ndim != 2 or cues.shape[0] == 0:
            raise EmptyContextException(f"Temporal cues must be a non-empty [L x d] tensor, got {cues.shape}")
        if cues.shape[1] != self.config.embed_dim:
            raise DimensionException(
                f"Cue width {cues.shape[1]} does not match embed_dim {self.config.embed_dim}"
            )

        if self.config.positional_encoding:
            table = sinusoidal_positions(cues.shape[0], cues.shape[1]).astype(get_default_dtype())
            cues = cues + Tensor(table)

        token = self.project_objects(f).token
        q: Tensor = self.query_set.queries
        for object_layer, temporal_layer in zip(self.object_layers, self.temporal_layers):
            q = object_layer(q, token)
            q = temporal_layer(q, cues)
        return q + self.output_ffn(self.output_norm(q))

    forward = __call__
