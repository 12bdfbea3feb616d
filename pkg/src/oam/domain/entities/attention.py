# src/oam/domain/entities/attention.py
"""Pre-norm transformer decoder building blocks."""

import numpy as np

from src.numeric.domain.entities.module import LayerNorm, Linear, Module
from src.numeric.domain.entities.tensor import Tensor
from src.numeric.domain.services import ops
from src.shared.domain.exceptions.base import DimensionException, EmptyContextException


class MultiHeadAttention(Module):
    """Multi-head scaled dot-product attention with an output projection."""

    def __init__(self, dim: int, num_heads: int, rng: np.random.Generator, zero_output: bool = True):
        if dim % num_heads != 0:
            raise DimensionException(f"dim {dim} is not divisible by num_heads {num_heads}")
        self.dim = dim
        self.num_heads = num_heads
        self.q_proj = Linear(dim, dim, rng)
        self.k_proj = Linear(dim, dim, rng)
        self.v_proj = Linear(dim, dim, rng)
        self.out_proj = Linear(dim, dim, rng, zero_init=zero_output)

    def __call__(self, queries: Tensor, context: Tensor) -> Tensor:
        if context.shape[0] == 0:
            raise EmptyContextException("Attention context is empty")
        if context.shape[1] != self.dim:
            raise DimensionException(
                f"Context width {context.shape[1]} does not match embed_dim {self.dim}"
            )

        q = self.q_proj(queries)
        k = self.k_proj(context)
        v = self.v_proj(context)

        head_dim = self.dim // self.num_heads
        heads = []
        for h in range(self.num_heads):
            lo, hi = h * head_dim, (h + 1) * head_dim
            heads.append(
                ops.scaled_dot_attention(
                    ops.columns(q, lo, hi), ops.columns(k, lo, hi), ops.columns(v, lo, hi)
                )
            )
        merged = heads[0] if len(heads) == 1 else ops.concat_columns(heads)
        return self.out_proj(merged)


class FeedForward(Module):
    """``linear(d -> mult*d)``, GELU, ``linear(-> d)``."""

    def __init__(self, dim: int, mult: int, rng: np.random.Generator, zero_output: bool = True):
        self.fc_in = Linear(dim, mult * dim, rng)
        self.fc_out = Linear(mult * dim, dim, rng, zero_init=zero_output)

    def __call__(self, x: Tensor) -> Tensor:
        return self.fc_out(ops.gelu(self.fc_in(x)))


class DecoderLayer(Module):
    """Query self-attention, cross-attention to a context, feed-forward.

    Each sub-block is ``q + f(LN(q))``.
    """

    def __init__(
        self,
        dim: int,
        num_heads: int,
        ffn_mult: int,
        rng: np.random.Generator,
        self_attention: bool = True,
        zero_output: bool = True,
        eps: float = 1e-5,
    ):
        self.use_self_attention = self_attention
        if self_attention:
            self.norm_self = LayerNorm(dim, eps)
            self.self_attn = MultiHeadAttention(dim, num_heads, rng, zero_output)
        self.norm_cross = LayerNorm(dim, eps)
        self.cross_attn = MultiHeadAttention(dim, num_heads, rng, zero_output)
        self.norm_ffn = LayerNorm(dim, eps)
        self.ffn = FeedForward(dim, ffn_mult, rng, zero_output)

    def __call__(self, queries: Tensor, context: Tensor) -> Tensor:
        q = queries
        if self.use_self_attention:
            normed = self.norm_self(q)
            q = q + self.self_attn(normed, normed)
        q = q + self.cross_attn(self.norm_cross(q), context)
        q = q + self.ffn(self.norm_ffn(q))
        return q
