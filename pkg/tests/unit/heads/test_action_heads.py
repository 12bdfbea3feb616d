"""Query pooling, classifiers and the three-head loss."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src.heads.domain.entities.action_heads import ActionHeads, max_pool_queries
from src.heads.domain.value_objects.label_triple import HeadOutputs, HeadSizes, LabelTriple
from src.numeric.domain.entities.tensor import Tensor
from src.shared.domain.exceptions.base import DataException, DimensionException, ValidationException

pytestmark = pytest.mark.unit


def zeroed(heads: ActionHeads) -> ActionHeads:
    for _, param in heads.named_parameters():
        param.assign(np.zeros(param.shape))
    return heads


class TestMaxPool:
    def test_columnwise_max(self):
        assert_array_equal(max_pool_queries(Tensor([[1.0, 2.0], [3.0, 0.0]])).data, [3.0, 2.0])

    def test_invariant_to_query_order(self, rng):
        q = rng.normal(size=(5, 4))
        a = max_pool_queries(Tensor(q)).data
        b = max_pool_queries(Tensor(q[rng.permutation(5)])).data
        assert_array_equal(a, b)


class TestClassify:
    def test_zero_weights_give_zero_logits(self, rng):
        heads = zeroed(ActionHeads(4, HeadSizes(3, 5, 7), rng))
        outputs = heads.classify(Tensor(rng.normal(size=4)))
        assert outputs.verb_logits.shape == (3,)
        assert outputs.noun_logits.shape == (5,)
        assert outputs.action_logits.shape == (7,)
        assert_array_equal(outputs.action_logits.data, np.zeros(7))

    def test_matches_scalar_loop(self, rng, float64):
        heads = ActionHeads(4, HeadSizes(3, 5, 7), rng)
        pooled = rng.normal(size=4)
        outputs = heads.classify(Tensor(pooled))
        for name in ("verb", "noun", "action"):
            layer = getattr(heads, name)
            size = layer.out_features
            expected = [
                sum(pooled[i] * layer.weight.data[i, j] for i in range(4)) + layer.bias.data[j]
                for j in range(size)
            ]
            assert_allclose(outputs.for_head(name).data, expected, rtol=1e-6)

    def test_dimension_mismatch(self, rng):
        heads = ActionHeads(4, HeadSizes(3, 5, 7), rng)
        with pytest.raises(DimensionException):
            heads.classify(Tensor(np.zeros(3)))


class TestLoss:
    def test_uniform_binary_heads(self, rng, float64):
        heads = ActionHeads(2, HeadSizes(2, 2, 2), rng)
        outputs = HeadOutputs(Tensor(np.zeros(2)), Tensor(np.zeros(2)), Tensor(np.zeros(2)))
        loss = heads.loss(outputs, LabelTriple(1, 1, 1))
        assert loss.item() == pytest.approx(3.0 * math.log(2.0), rel=1e-12)

    def test_confident_correct_logits(self, rng):
        heads = ActionHeads(2, HeadSizes(3, 3, 3), rng)
        logits = Tensor([0.0, 0.0, 1000.0])
        loss = heads.loss(HeadOutputs(logits, logits, logits), LabelTriple(2, 2, 2))
        assert loss.item() < 1e-6

    def test_matches_scalar_loop(self, rng, float64):
        heads = ActionHeads(2, HeadSizes(4, 5, 6), rng, loss_weights=(1.0, 2.0, 0.5))
        raw = [rng.normal(size=n) for n in (4, 5, 6)]
        label = LabelTriple(3, 1, 5)

        def nll(values: np.ndarray, target: int) -> float:
            top = max(values)
            return math.log(sum(math.exp(v - top) for v in values)) - (values[target] - top)

        expected = nll(raw[0], 3) + 2.0 * nll(raw[1], 1) + 0.5 * nll(raw[2], 5)
        loss = heads.loss(HeadOutputs(*(Tensor(v) for v in raw)), label)
        assert loss.item() == pytest.approx(expected, rel=1e-6)

    def test_head_losses_are_unweighted(self, rng, float64):
        heads = ActionHeads(2, HeadSizes(2, 2, 2), rng, loss_weights=(0.0, 0.0, 3.0))
        zeros = Tensor(np.zeros(2))
        label = LabelTriple(1, 1, 1)
        parts = heads.head_losses(HeadOutputs(zeros, zeros, zeros), label)
        assert parts["verb"].item() == pytest.approx(math.log(2.0))
        assert heads.weighted_sum(parts).item() == pytest.approx(3.0 * math.log(2.0))

    def test_background_label_targets_slot_zero(self, rng, float64):
        heads = ActionHeads(2, HeadSizes(2, 2, 2), rng)
        logits = Tensor([1000.0, 0.0])
        loss = heads.loss(HeadOutputs(logits, logits, logits), LabelTriple.background_label())
        assert loss.item() < 1e-6

    def test_label_out_of_range(self, rng):
        heads = ActionHeads(2, HeadSizes(2, 2, 2), rng)
        zeros = Tensor(np.zeros(2))
        with pytest.raises(DataException):
            heads.loss(HeadOutputs(zeros, zeros, zeros), LabelTriple(1, 4, 1))


class TestLabelTriple:
    def test_background_uses_zero_everywhere(self):
        with pytest.raises(ValidationException):
            LabelTriple(1, 0, 0, background=True)

    def test_action_ids_are_positive(self):
        with pytest.raises(ValidationException):
            LabelTriple(0, 2, 3)

    def test_head_sizes_need_a_class(self):
        with pytest.raises(ValidationException):
            HeadSizes(1, 4, 4)
