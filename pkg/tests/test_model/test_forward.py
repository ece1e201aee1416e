import math

import numpy as np
import pytest

from batm.embedding import init_random, lookup
from batm.model.attention import classify, document_attention, multi_head
from batm.model.forward import forward
from batm.model.params import init_params
from tests.factories import make_params, make_sequence, random_sequence, zero_attention
from tests.oracles import forward_oracle


class TestForward:
    def test_matches_scalar_oracle(self, rng):
        """N=3, K=2, E=2, D_k=D_h=2, C=2 的小实例与逐元素标量实现一致。"""
        params = make_params(rng, V=6, E=2, K=2, Dk=2, Dh=2, C=2)
        seq = make_sequence([2, 5, 2])
        record = forward(seq, params)
        oracle = forward_oracle(seq.ids, seq.mask, params)
        np.testing.assert_allclose(record.alpha, oracle["alpha"], rtol=0, atol=1e-12)
        np.testing.assert_allclose(record.H, oracle["H"], rtol=0, atol=1e-12)
        np.testing.assert_allclose(record.beta, oracle["beta"], rtol=0, atol=1e-12)
        np.testing.assert_allclose(record.d, oracle["d"], rtol=0, atol=1e-12)
        np.testing.assert_allclose(record.y, oracle["y"], rtol=0, atol=1e-12)

    def test_matches_oracle_with_padding(self, rng):
        params = make_params(rng, V=9, E=3, K=3, Dk=2, Dh=3, C=3)
        seq = make_sequence([4, 7], max_len=5)
        record = forward(seq, params)
        oracle = forward_oracle(seq.ids, seq.mask, params)
        np.testing.assert_allclose(record.alpha[:, :2], oracle["alpha"], rtol=0, atol=1e-12)
        assert np.all(record.alpha[:, 2:] == 0)
        np.testing.assert_allclose(record.y, oracle["y"], rtol=0, atol=1e-12)

    def test_composes_attention_operations(self, rng):
        """前向传播等于 lookup → multi_head → document_attention → classify 的组合。"""
        params = make_params(rng, V=8, E=3, K=3, Dk=2, Dh=2, C=4)
        seq = make_sequence([2, 6, 3], max_len=5)
        record = forward(seq, params)

        e_seq = lookup(seq, params.embedding)
        heads = multi_head(e_seq, np.asarray(seq.mask), params)
        doc = document_attention(heads.H, params.pool)
        np.testing.assert_array_equal(record.alpha, heads.alpha)
        np.testing.assert_array_equal(record.g, heads.g)
        np.testing.assert_array_equal(record.T, heads.T)
        np.testing.assert_array_equal(record.beta, doc.beta)
        np.testing.assert_array_equal(record.mu, doc.mu)
        np.testing.assert_allclose(record.y, classify(doc.d, params.classifier), rtol=0, atol=1e-15)
        assert heads.T.shape == (3, 3, 2)
        assert np.all(heads.g[:, 3:] == 0)

    def test_zero_params_uniform_prediction(self, rng):
        params = zero_attention(make_params(rng, C=5))
        record = forward(make_sequence([1, 2, 3], max_len=4), params)
        np.testing.assert_allclose(record.y, [0.2] * 5)

    def test_deterministic(self, rng):
        params = make_params(rng)
        seq = make_sequence([1, 3, 2])
        a, b = forward(seq, params), forward(seq, params)
        for name in ("alpha", "H", "beta", "d", "log_y"):
            assert getattr(a, name).tobytes() == getattr(b, name).tobytes()

    def test_mask_independence(self, rng):
        """被屏蔽位置对应的嵌入行改变不影响结果。"""
        params = make_params(rng, V=8)
        seq = make_sequence([3, 4], max_len=4)
        before = forward(seq, params)
        params.embedding.matrix[0] += 10.0
        params.embedding.matrix[5:] += 10.0
        after = forward(seq, params)
        np.testing.assert_array_equal(before.y, after.y)

    def test_head_permutation(self, rng):
        params = make_params(rng, K=3)
        seq = make_sequence([1, 2, 3, 4])
        permuted = params.copy()
        order = [2, 0, 1]
        for name in ("head_W", "head_b", "head_v"):
            getattr(permuted, name)[...] = getattr(params, name)[order]
        a, b = forward(seq, params), forward(seq, permuted)
        np.testing.assert_allclose(b.alpha, a.alpha[order], rtol=0, atol=1e-15)
        np.testing.assert_allclose(b.beta, a.beta[order], rtol=0, atol=1e-15)
        np.testing.assert_allclose(b.y, a.y, rtol=0, atol=1e-14)

    def test_convexity(self, rng):
        params = make_params(rng, E=2, K=3)
        seq = make_sequence([2, 3, 4])
        record = forward(seq, params)
        lo, hi = record.x.min(axis=0), record.x.max(axis=0)
        assert np.all(record.H >= lo - 1e-12) and np.all(record.H <= hi + 1e-12)
        assert np.all(record.d >= record.H.min(axis=0) - 1e-12)
        assert np.all(record.d <= record.H.max(axis=0) + 1e-12)

    def test_out_of_range_id(self, rng):
        params = make_params(rng, V=4)
        with pytest.raises(ValueError):
            forward(make_sequence([9]), params)


class TestNormalization:
    def test_random_forwards_float32(self):
        """1000 次随机前向：α、β、y 的和在 1e-6 内为 1，屏蔽位置权重严格为 0。"""
        rng = np.random.default_rng(0)
        emb = init_random(30, 8, seed=0)
        params = init_params(emb, num_classes=4, num_heads=3, head_dim=4, pool_dim=4, seed=1)
        for _ in range(1000):
            seq = random_sequence(rng, 30, 7)
            record = forward(seq, params)
            assert record.alpha.dtype == np.float32
            np.testing.assert_allclose(record.alpha.sum(axis=1), 1.0, atol=1e-6)
            assert np.all(record.alpha[:, ~record.mask] == 0)
            assert abs(record.beta.sum() - 1) < 1e-6
            assert abs(record.y.sum() - 1) < 1e-6

    def test_float64_tolerance(self, rng):
        params = make_params(rng, K=3)
        record = forward(make_sequence([1, 2, 3, 4, 5], max_len=6), params)
        np.testing.assert_allclose(record.alpha.sum(axis=1), 1.0, rtol=0, atol=1e-12)
        assert abs(record.y.sum() - 1) < 1e-12

    def test_zero_embedding_params_give_ln_c(self, rng):
        params = zero_attention(make_params(rng, C=7))
        record = forward(make_sequence([1, 2]), params)
        assert -record.log_y[0] == pytest.approx(math.log(7), abs=1e-15)
