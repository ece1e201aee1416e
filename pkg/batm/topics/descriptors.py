"""Top-T topic descriptors from document-token matrices."""

from typing import Sequence

import numpy as np

from ..corpus.vocabulary import Vocabulary
from ..utils.logger import logger
from .matrix import Average, TopicMatrix
from .models import TopicDescriptor, TopicTerm

__all__ = ["topic_descriptor", "topic_descriptors"]


def topic_descriptor(
    M: TopicMatrix, T: int, vocab: Vocabulary, average: Average = "all"
) -> TopicDescriptor:
    """Rank the alphabetic tokens of one head by their mean weight.

    PAD, UNK, non-alphabetic and never-attended tokens are dropped. Equal weights
    are ordered lexicographically.

    Args:
        M: The head's document-token matrix.
        T: Number of terms to keep.
        vocab: Vocabulary the matrix columns index.
        average: Column averaging mode, see :meth:`TopicMatrix.column_means`.

    Raises:
        ValueError: If ``T < 1`` or the matrix width differs from the vocabulary.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if M.vocab_size != len(vocab):
        raise ValueError(f"Topic matrix has {M.vocab_size} columns, vocabulary has {len(vocab)}")

    means = M.column_means(average)
    candidates = [int(i) for i in np.flatnonzero(means > 0) if vocab.is_descriptor_token(int(i))]
    candidates.sort(key=lambda i: (-means[i], vocab.tokens[i]))
    if len(candidates) < T:
        logger.warning(f"Head {M.head}: only {len(candidates)} descriptor tokens available, wanted {T}")
    return TopicDescriptor(
        head=M.head,
        terms=[TopicTerm(token=vocab.tokens[i], weight=float(means[i])) for i in candidates[:T]],
    )


def topic_descriptors(
    matrices: Sequence[TopicMatrix],
    T: int,
    vocab: Vocabulary,
    average: Average = "all",
    head_usage: Sequence[float] | None = None,
) -> list[TopicDescriptor]:
    """Descriptors of every head, in head order."""
    descriptors = [topic_descriptor(M, T, vocab, average) for M in matrices]
    if head_usage is not None:
        for descriptor, usage in zip(descriptors, head_usage):
            descriptor.head_usage = float(usage)
    return descriptors
