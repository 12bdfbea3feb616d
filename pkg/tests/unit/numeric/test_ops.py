"""Differentiable primitives against hand-computed values and scalar loops."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src.numeric.domain.entities.tensor import Tensor, backward
from src.numeric.domain.services import ops
from src.shared.domain.exceptions.base import (
    DimensionException,
    EmptyContextException,
    RankException,
)

pytestmark = pytest.mark.unit


def loop_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    m, k = a.shape
    _, n = b.shape
    out = np.zeros((m, n))
    for i in range(m):
        for j in range(n):
            for p in range(k):
                out[i, j] += a[i, p] * b[p, j]
    return out


def loop_layer_norm(x: np.ndarray, gamma: np.ndarray, beta: np.ndarray, eps: float) -> np.ndarray:
    out = np.zeros_like(x)
    for i, row in enumerate(x):
        mean = sum(row) / len(row)
        var = sum((v - mean) ** 2 for v in row) / len(row)
        for j, v in enumerate(row):
            out[i, j] = (v - mean) / math.sqrt(var + eps) * gamma[j] + beta[j]
    return out


def loop_attention(q: np.ndarray, k: np.ndarray, v: np.ndarray) -> np.ndarray:
    d = q.shape[1]
    out = np.zeros((q.shape[0], v.shape[1]))
    for i in range(q.shape[0]):
        scores = [sum(q[i, p] * k[j, p] for p in range(d)) / math.sqrt(d) for j in range(k.shape[0])]
        top = max(scores)
        weights = [math.exp(s - top) for s in scores]
        total = sum(weights)
        for j, w in enumerate(weights):
            out[i] += (w / total) * v[j]
    return out


class TestMatmul:
    def test_identity(self):
        b = Tensor([[5.0, 6.0], [7.0, 8.0]])
        assert_array_equal(ops.matmul(Tensor(np.eye(2)), b).data, b.data)

    def test_hand_computed(self):
        assert_array_equal(ops.matmul(Tensor([[1.0, 2.0]]), Tensor([[3.0], [4.0]])).data, [[11.0]])

    def test_matches_triple_loop(self, rng, float64):
        a = rng.normal(size=(3, 4))
        b = rng.normal(size=(4, 2))
        assert_allclose(ops.matmul(Tensor(a), Tensor(b)).data, loop_matmul(a, b), rtol=1e-6)

    def test_random_shapes_in_single_precision(self, rng):
        for _ in range(20):
            m, k, n = rng.integers(1, 9, size=3)
            a = rng.normal(size=(m, k))
            b = rng.normal(size=(k, n))
            out = ops.matmul(Tensor(a), Tensor(b)).data
            assert np.max(np.abs(out - loop_matmul(a, b))) < 1e-5

    def test_shape_mismatch_names_both_shapes(self):
        with pytest.raises(DimensionException) as exc:
            ops.matmul(Tensor(np.zeros((2, 3))), Tensor(np.zeros((2, 3))))
        assert "(2, 3)" in exc.value.message


class TestSoftmax:
    def test_symmetric_row(self):
        assert_allclose(ops.softmax_rows(Tensor([[0.0, 0.0]])).data, [[0.5, 0.5]])

    def test_log_two(self, float64):
        out = ops.softmax_rows(Tensor([[math.log(2.0), 0.0]])).data
        assert_allclose(out, [[2.0 / 3.0, 1.0 / 3.0]], rtol=1e-12)

    def test_large_logits_do_not_overflow(self):
        out = ops.softmax_rows(Tensor([[1000.0, 1000.0]])).data
        assert np.all(np.isfinite(out))
        assert_allclose(out, [[0.5, 0.5]])

    def test_rows_sum_to_one(self, rng):
        out = ops.softmax_rows(Tensor(rng.normal(size=(4, 7)))).data
        assert_allclose(out.sum(axis=1), np.ones(4), rtol=1e-6)
        assert np.all(out >= 0)

    def test_rows_sum_to_one_over_a_wide_range(self):
        for seed in range(100):
            logits = np.random.default_rng(seed).uniform(-50.0, 50.0, size=(6, 9))
            out = ops.softmax_rows(Tensor(logits)).data
            assert np.all(np.isfinite(out))
            assert np.all(out >= 0)
            assert_allclose(out.sum(axis=1), np.ones(6), rtol=1e-5)


class TestLayerNorm:
    def test_already_normalized_row(self, float64):
        out = ops.layer_norm(Tensor([[1.0, -1.0]]), Tensor([1.0, 1.0]), Tensor([0.0, 0.0]), eps=1e-12)
        assert_allclose(out.data, [[1.0, -1.0]], rtol=1e-9)

    def test_constant_row_returns_beta(self):
        beta = Tensor([0.1, 0.2, 0.3])
        out = ops.layer_norm(Tensor([[4.0, 4.0, 4.0]]), Tensor([1.0, 1.0, 1.0]), beta)
        assert_allclose(out.data, [[0.1, 0.2, 0.3]], rtol=1e-6)

    def test_matches_scalar_loop(self, rng, float64):
        x = rng.normal(size=(2, 5))
        gamma = rng.normal(size=5)
        beta = rng.normal(size=5)
        out = ops.layer_norm(Tensor(x), Tensor(gamma), Tensor(beta))
        assert_allclose(out.data, loop_layer_norm(x, gamma, beta, 1e-5), rtol=1e-6)

    def test_gamma_length_mismatch(self):
        with pytest.raises(DimensionException):
            ops.layer_norm(Tensor(np.zeros((1, 3))), Tensor(np.ones(2)), Tensor(np.zeros(3)))


class TestAttention:
    def test_single_key_broadcasts_value(self, rng):
        q = Tensor(rng.normal(size=(3, 4)))
        k = Tensor(rng.normal(size=(1, 4)))
        v = Tensor([[1.0, 2.0, 3.0, 4.0]])
        out = ops.scaled_dot_attention(q, k, v).data
        assert_allclose(out, np.tile(v.data, (3, 1)), rtol=1e-6)

    def test_identical_keys_average_values(self, rng):
        key = rng.normal(size=(1, 4))
        k = Tensor(np.vstack([key, key]))
        v = Tensor([[1.0, 0.0, 2.0, 4.0], [3.0, 2.0, 0.0, 0.0]])
        out = ops.scaled_dot_attention(Tensor(rng.normal(size=(2, 4))), k, v).data
        assert_allclose(out, [[2.0, 1.0, 1.0, 2.0]] * 2, rtol=1e-6)

    def test_matches_scalar_loop(self, rng, float64):
        q = rng.normal(size=(2, 4))
        k = rng.normal(size=(3, 4))
        v = rng.normal(size=(3, 4))
        out = ops.scaled_dot_attention(Tensor(q), Tensor(k), Tensor(v)).data
        assert_allclose(out, loop_attention(q, k, v), rtol=1e-6)

    def test_empty_context(self):
        with pytest.raises(EmptyContextException):
            ops.attention_weights(Tensor(np.zeros((1, 4))), Tensor(np.zeros((0, 4))))


class TestReductions:
    def test_max_rows(self):
        assert_array_equal(ops.max_rows(Tensor([[1.0, 2.0], [3.0, 0.0]])).data, [3.0, 2.0])

    def test_max_rows_single_row_is_identity(self):
        assert_array_equal(ops.max_rows(Tensor([[1.5, -2.0, 0.0]])).data, [1.5, -2.0, 0.0])

    def test_max_rows_rejects_vectors(self):
        with pytest.raises(RankException):
            ops.max_rows(Tensor([1.0, 2.0]))

    def test_cross_entropy_uniform(self, float64):
        loss = ops.cross_entropy(Tensor([0.0, 0.0]), 1)
        assert loss.shape == ()
        assert loss.item() == pytest.approx(math.log(2.0), rel=1e-12)

    def test_cross_entropy_saturated(self):
        assert ops.cross_entropy(Tensor([0.0, 1000.0, 0.0]), 1).item() < 1e-6


class TestSlicing:
    def test_columns(self):
        x = Tensor([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        assert_array_equal(ops.columns(x, 1, 3).data, [[2.0, 3.0], [5.0, 6.0]])

    def test_columns_gradient_lands_in_the_slice(self):
        x = Tensor(np.ones((2, 4)), requires_grad=True)
        backward(ops.sum_all(ops.columns(x, 1, 3)))
        assert_array_equal(x.grad, [[0.0, 1.0, 1.0, 0.0]] * 2)

    @pytest.mark.parametrize("start, stop", [(2, 2), (-1, 2), (0, 5)])
    def test_columns_out_of_range(self, start, stop):
        with pytest.raises(DimensionException):
            ops.columns(Tensor(np.zeros((1, 4))), start, stop)

    def test_concat_columns(self):
        out = ops.concat_columns([Tensor([[1.0], [2.0]]), Tensor([[3.0, 4.0], [5.0, 6.0]])])
        assert_array_equal(out.data, [[1.0, 3.0, 4.0], [2.0, 5.0, 6.0]])

    def test_concat_rows(self):
        out = ops.concat_rows([Tensor([[1.0, 2.0]]), Tensor([[3.0, 4.0], [5.0, 6.0]])])
        assert_array_equal(out.data, [[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])

    def test_concat_splits_the_gradient_back(self):
        a = Tensor(np.zeros((1, 2)), requires_grad=True)
        b = Tensor(np.zeros((2, 2)), requires_grad=True)
        weights = Tensor([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
        backward(ops.sum_all(ops.concat_rows([a, b]) * weights))
        assert_array_equal(a.grad, [[1.0, 2.0]])
        assert_array_equal(b.grad, [[3.0, 4.0], [5.0, 6.0]])

    def test_concat_columns_row_mismatch(self):
        with pytest.raises(DimensionException):
            ops.concat_columns([Tensor(np.zeros((1, 2))), Tensor(np.zeros((2, 2)))])

    def test_concat_rows_column_mismatch(self):
        with pytest.raises(DimensionException):
            ops.concat_rows([Tensor(np.zeros((1, 2))), Tensor(np.zeros((1, 3)))])

    def test_concat_of_nothing(self):
        with pytest.raises(EmptyContextException):
            ops.concat_rows([])
        with pytest.raises(EmptyContextException):
            ops.concat_columns([])
