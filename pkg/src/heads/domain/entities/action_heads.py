# src/heads/domain/entities/action_heads.py
"""Query pooling, the verb/noun/action classifiers and their loss."""

import numpy as np

from src.heads.domain.value_objects.label_triple import HEADS, HeadOutputs, HeadSizes, LabelTriple
from src.numeric.domain.entities.module import Linear, Module
from src.numeric.domain.entities.tensor import Tensor
from src.numeric.domain.services import ops
from src.shared.domain.exceptions.base import DataException, DimensionException


def max_pool_queries(q: Tensor) -> Tensor:
    """Global max over the query rows, ``[N x d] -> [d]``."""
    return ops.max_rows(q)


class ActionHeads(Module):
    """Three independent affine classifiers over the pooled vector."""

    def __init__(
        self,
        dim: int,
        sizes: HeadSizes,
        rng: np.random.Generator,
        loss_weights: tuple[float, float, float] = (1.0, 1.0, 1.0),
    ):
        self.dim = dim
        self.sizes = sizes
        self.loss_weights = loss_weights
        self.verb = Linear(dim, sizes.verb, rng)
        self.noun = Linear(dim, sizes.noun, rng)
        self.action = Linear(dim, sizes.action, rng)

    def classify(self, pooled: Tensor) -> HeadOutputs:
        if pooled.shape != (self.dim,):
            raise DimensionException(f"Pooled vector must have shape ({self.dim},), got {pooled.shape}")
        row = ops.reshape(pooled, (1, self.dim))
        return HeadOutputs(
            verb_logits=ops.reshape(self.verb(row), (self.sizes.verb,)),
            noun_logits=ops.reshape(self.noun(row), (self.sizes.noun,)),
            action_logits=ops.reshape(self.action(row), (self.sizes.action,)),
        )

    def head_losses(self, outputs: HeadOutputs, label: LabelTriple) -> dict[str, Tensor]:
        """Unweighted cross-entropy of each head."""
        losses = {}
        for head in HEADS:
            target = label.for_head(head)
            size = self.sizes.for_head(head)
            if not 0 <= target < size:
                raise DataException(f"{head} label {target} out of range for {size} classes")
            losses[head] = ops.cross_entropy(outputs.for_head(head), target)
        return losses

    def loss(self, outputs: HeadOutputs, label: LabelTriple) -> Tensor:
        """Weighted sum of the three cross-entropies."""
        return self.weighted_sum(self.head_losses(outputs, label))

    def weighted_sum(self, losses: dict[str, Tensor]) -> Tensor:
        total: Tensor | None = None
        for head, weight in zip(HEADS, self.loss_weights):
            term = losses[head]
            if weight != 1.0:
                term = ops.mul(term, weight)
            total = term if total is None else total + term
        assert total is not None
        return total
