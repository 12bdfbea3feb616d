# src/oam/domain/value_objects/oa_config.py
"""Object-aware module configuration value object."""

from src.shared.domain.exceptions.base import ValidationException
from src.shared.domain.value_objects.base import ValueObject


class OAConfig(ValueObject):
    """Shape and switches of the object-aware module."""

    def __init__(
        self,
        num_queries: int = 16,
        embed_dim: int = 1024,
        num_heads: int = 4,
        ffn_mult: int = 4,
        num_blocks: int = 1,
        self_attention: bool = True,
        positional_encoding: bool = False,
        zero_init_outputs: bool = True,
        query_init_std: float = 0.02,
        layer_norm_eps: float = 1e-5,
    ):
        if num_queries < 1:
            raise ValidationException(f"num_queries must be at least 1, got {num_queries}")
        if embed_dim < 1 or num_heads < 1:
            raise ValidationException("embed_dim and num_heads must be positive")
        if embed_dim % num_heads != 0:
            raise ValidationException(
                f"embed_dim {embed_dim} is not divisible by num_heads {num_heads}"
            )
        if ffn_mult < 1:
            raise ValidationException(f"ffn_mult must be at least 1, got {ffn_mult}")
        if num_blocks < 1:
            raise ValidationException(f"num_blocks must be at least 1, got {num_blocks}")

        self.num_queries = num_queries
        self.embed_dim = embed_dim
        self.num_heads = num_heads
        self.ffn_mult = ffn_mult
        self.num_blocks = num_blocks
        self.self_attention = self_attention
        self.positional_encoding = positional_encoding
        self.zero_init_outputs = zero_init_outputs
        self.query_init_std = query_init_std
        self.layer_norm_eps = layer_norm_eps

    @property
    def head_dim(self) -> int:
        return self.embed_dim // self.num_heads
