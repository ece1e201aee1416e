import numpy as np
import pytest

from batm.training.metrics import classification_metrics, evaluate, predict
from tests.factories import make_params, make_sequence, make_split


class TestClassificationMetrics:
    def test_perfect(self):
        result = classification_metrics([0, 1, 1, 0], [0, 1, 1, 0], 2)
        assert result.accuracy == 1.0
        assert result.macro_f1 == 1.0
        assert result.confusion == [[2, 0], [0, 2]]

    def test_half_right(self):
        result = classification_metrics([0, 0, 1, 1], [0, 1, 0, 1], 2)
        assert result.accuracy == pytest.approx(0.5)
        assert result.macro_f1 == pytest.approx(0.5)
        assert result.per_class_f1 == pytest.approx([0.5, 0.5])

    def test_class_without_support_counts_as_zero(self):
        """标签表中没有样本的类别 F1 记为 0，仍计入宏平均。"""
        result = classification_metrics([0, 0, 1, 1], [0, 0, 1, 1], 3)
        assert result.per_class_f1 == pytest.approx([1.0, 1.0, 0.0])
        assert result.macro_f1 == pytest.approx(2 / 3)
        assert len(result.confusion) == 3

    def test_empty_raises(self):
        with pytest.raises(ValueError, match="empty"):
            classification_metrics([], [], 2)


class TestEvaluate:
    def test_matches_predictions(self, rng):
        params = make_params(rng, V=6, C=3)
        sequences = [make_sequence([1, 2]), make_sequence([3]), make_sequence([4, 5, 1])]
        split = make_split(sequences, [0, 1, 2], ["a", "b", "c"])
        y_pred = predict(params, split.validation)
        result = evaluate(params, split.validation)
        expected = np.mean(np.array(y_pred) == np.array([0, 1, 2]))
        assert result.accuracy == pytest.approx(expected)
        assert result.num_examples == 3

    def test_thread_count_does_not_matter(self, rng):
        params = make_params(rng, V=6, C=2)
        sequences = [make_sequence([i % 5 + 1, (i * 3) % 5 + 1]) for i in range(20)]
        split = make_split(sequences, [i % 2 for i in range(20)], ["a", "b"])
        assert predict(params, split.train, threads=1) == predict(params, split.train, threads=4)

    def test_empty_dataset(self, rng):
        with pytest.raises(ValueError):
            evaluate(make_params(rng), [])
