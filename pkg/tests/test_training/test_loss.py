import math

import numpy as np
import pytest

from batm.model.forward import forward
from batm.training.loss import cross_entropy, doc_entropy, head_doc_entropies, total_loss
from tests.factories import make_params, make_sequence, zero_attention


class TestCrossEntropy:
    def test_uniform_prediction(self, rng):
        record = forward(make_sequence([1, 2]), zero_attention(make_params(rng, C=15)))
        assert cross_entropy(record, 3) == pytest.approx(math.log(15), abs=1e-12)

    def test_perfect_prediction(self, rng):
        params = zero_attention(make_params(rng, C=2))
        params.cls_b[:] = [1000.0, 0.0]
        assert cross_entropy(forward(make_sequence([1]), params), 0) == 0.0

    def test_analytic_value(self, rng):
        params = zero_attention(make_params(rng, C=2))
        params.cls_b[:] = [0.0, math.log(3)]
        assert cross_entropy(forward(make_sequence([1]), params), 1) == pytest.approx(0.28768, abs=1e-5)

    def test_out_of_range_label(self, rng):
        record = forward(make_sequence([1]), make_params(rng, C=2))
        with pytest.raises(ValueError):
            cross_entropy(record, 2)


class TestDocEntropy:
    def test_one_hot(self):
        assert doc_entropy(np.array([0.0, 1.0, 0.0]), np.array([True, True, False])) == 0.0

    def test_uniform(self):
        alpha = np.array([0.25, 0.25, 0.25, 0.25, 0.0])
        mask = np.array([True, True, True, True, False])
        assert doc_entropy(alpha, mask) == pytest.approx(math.log(4), abs=1e-12)

    def test_analytic(self):
        alpha = np.array([0.5, 0.25, 0.25])
        assert doc_entropy(alpha, np.ones(3, dtype=bool)) == pytest.approx(1.5 * math.log(2), abs=1e-12)

    def test_bounded_by_log_length(self, rng):
        params = make_params(rng, K=3)
        record = forward(make_sequence([1, 2, 3, 4], max_len=6), params)
        entropies = head_doc_entropies(record)
        assert np.all(entropies >= 0)
        assert np.all(entropies <= math.log(4) + 1e-12)


class TestTotalLoss:
    def test_lambda_zero_is_cross_entropy(self, rng):
        record = forward(make_sequence([1, 2, 3]), make_params(rng))
        loss = total_loss(record, 1, 0.0)
        assert loss.total == cross_entropy(record, 1)

    def test_analytic_composition(self, rng):
        """λ=1，各头在 4 个词上均匀，y 在 15 类上均匀：总损失 = ln 15 + ln 4。"""
        params = zero_attention(make_params(rng, K=3, C=15))
        record = forward(make_sequence([1, 2, 3, 4], max_len=5), params)
        loss = total_loss(record, 0, 1.0)
        assert loss.total == pytest.approx(4.09434, abs=1e-5)
        assert loss.mean_doc_entropy == pytest.approx(math.log(4), abs=1e-12)

    def test_linear_in_lambda(self, rng):
        record = forward(make_sequence([1, 2, 3]), make_params(rng))
        a = total_loss(record, 0, 0.3)
        b = total_loss(record, 0, 0.6)
        assert b.total - b.ce == pytest.approx(2 * (a.total - a.ce), rel=1e-12)

    def test_breakdown_fields(self, rng):
        record = forward(make_sequence([1, 2, 3]), make_params(rng, K=2))
        loss = total_loss(record, 0, 0.5)
        assert len(loss.per_head_doc_entropy) == 2
        assert loss.total == pytest.approx(loss.ce + 0.5 * np.mean(loss.per_head_doc_entropy), abs=1e-12)
        assert loss.model_dump(by_alias=True)["lambda"] == 0.5

    def test_negative_lambda(self, rng):
        record = forward(make_sequence([1]), make_params(rng))
        with pytest.raises(ValueError):
            total_loss(record, 0, -1.0)
