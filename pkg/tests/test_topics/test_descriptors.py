import numpy as np
import pytest
from scipy import sparse

from batm.topics.descriptors import topic_descriptor, topic_descriptors
from batm.topics.matrix import TopicMatrix
from tests.factories import make_vocab


def topic_matrix(rows: list[list[float]], head: int = 0) -> TopicMatrix:
    return TopicMatrix(head=head, matrix=sparse.csr_matrix(np.array(rows, dtype=float)))


class TestTopicDescriptor:
    def test_single_column(self):
        vocab = make_vocab(["alpha", "beta"])
        descriptor = topic_descriptor(topic_matrix([[0, 0, 0, 1.0]]), 1, vocab)
        assert descriptor.words == ["beta"]
        assert descriptor.terms[0].weight == pytest.approx(1.0)

    def test_ranked_by_mean_weight(self):
        vocab = make_vocab(["alpha", "beta", "gamma"])
        M = topic_matrix([[0, 0, 0.2, 0.5, 0.3], [0, 0, 0.6, 0.0, 0.4]])
        descriptor = topic_descriptor(M, 3, vocab)
        assert descriptor.words == ["alpha", "gamma", "beta"]
        assert [t.weight for t in descriptor.terms] == pytest.approx([0.4, 0.35, 0.25])

    def test_ties_are_lexicographic(self):
        vocab = make_vocab(["zeta", "beta", "alpha"])
        descriptor = topic_descriptor(topic_matrix([[0, 0, 0.25, 0.25, 0.5]]), 3, vocab)
        assert descriptor.words == ["alpha", "beta", "zeta"]

    def test_filters_reserved_non_alphabetic_and_unattended(self):
        """PAD、UNK、非字母 token 与权重为 0 的 token 不进入描述词。"""
        vocab = make_vocab(["2024", "word", "unused", "x-ray"])
        M = topic_matrix([[0.1, 0.2, 0.3, 0.2, 0.0, 0.2]])
        descriptor = topic_descriptor(M, 10, vocab)
        assert descriptor.words == ["word"]

    def test_truncates_to_T(self):
        vocab = make_vocab(["a", "b", "c"])
        descriptor = topic_descriptor(topic_matrix([[0, 0, 0.5, 0.3, 0.2]]), 2, vocab)
        assert descriptor.words == ["a", "b"]

    def test_shortfall_warns(self, log_messages):
        vocab = make_vocab(["alpha", "beta"])
        descriptor = topic_descriptor(topic_matrix([[0, 0, 0.5, 0.5]], head=4), 5, vocab)
        assert len(descriptor.terms) == 2
        assert any("Head 4" in m and "only 2" in m for m in log_messages)

    def test_present_average(self):
        vocab = make_vocab(["rare", "common"])
        M = topic_matrix([[0, 0, 0.9, 0.1], [0, 0, 0, 1.0], [0, 0, 0, 1.0]])
        assert topic_descriptor(M, 2, vocab, average="all").words == ["common", "rare"]
        assert topic_descriptor(M, 2, vocab, average="present").words == ["rare", "common"]

    def test_invalid_arguments(self):
        vocab = make_vocab(["alpha"])
        with pytest.raises(ValueError, match="T must be"):
            topic_descriptor(topic_matrix([[0, 0, 1.0]]), 0, vocab)
        with pytest.raises(ValueError, match="columns"):
            topic_descriptor(topic_matrix([[0, 0, 0.5, 0.5]]), 1, vocab)


def test_descriptors_of_every_head_carry_usage():
    vocab = make_vocab(["alpha", "beta"])
    matrices = [topic_matrix([[0, 0, 1.0, 0]], head=0), topic_matrix([[0, 0, 0, 1.0]], head=1)]
    descriptors = topic_descriptors(matrices, 1, vocab, head_usage=[0.25, 0.75])
    assert [d.head for d in descriptors] == [0, 1]
    assert [d.words for d in descriptors] == [["alpha"], ["beta"]]
    assert [d.head_usage for d in descriptors] == [0.25, 0.75]
