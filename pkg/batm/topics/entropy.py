"""Token-level and vocabulary-level entropy of the head weights."""

from typing import Sequence

import numpy as np
from scipy.special import entr

from ..corpus.vocabulary import Vocabulary
from ..model.params import ModelParams
from ..models import TokenSequence
from .matrix import TopicMatrix, scan_corpus
from .models import EntropyReport

__all__ = [
    "head_token_means",
    "token_entropy",
    "token_entropies",
    "vocabulary_entropy",
    "entropy_report",
]


def head_token_means(matrices: Sequence[TopicMatrix]) -> np.ndarray:
    """``K × V`` column means of every head."""
    return np.stack([M.column_means("all") for M in matrices])


def token_entropies(means: np.ndarray) -> np.ndarray:
    """Entropy of every column of a ``K × V`` means array after normalizing it to sum 1.

    Columns that sum to zero yield NaN.
    """
    totals = means.sum(axis=0)
    p = np.divide(means, totals, out=np.zeros_like(means), where=totals > 0)
    result = entr(p).sum(axis=0)
    result[totals <= 0] = np.nan
    return result


def token_entropy(matrices: Sequence[TopicMatrix], token_id: int) -> float | None:
    """Entropy of a token's mean weight across heads, normalized over heads.

    Returns:
        The entropy in nats, or None when no head ever attends the token.
    """
    column = np.array([M.column_means("all")[token_id] for M in matrices])
    value = token_entropies(column[:, None])[0]
    return None if np.isnan(value) else float(value)


def vocabulary_entropy(matrices: Sequence[TopicMatrix]) -> list[float]:
    """Entropy of every head's mean weight distribution over the vocabulary."""
    result = []
    for M in matrices:
        means = M.column_means("all")
        result.append(float(entr(means / means.sum()).sum()))
    return result


def entropy_report(
    params: ModelParams,
    corpus: Sequence[TokenSequence],
    vocab: Vocabulary,
    threads: int = 1,
) -> EntropyReport:
    """Average document and token entropy of a model over a corpus.

    Raises:
        ValueError: If the corpus is empty.
    """
    if not corpus:
        raise ValueError("Cannot compute an entropy report of an empty corpus")
    scan = scan_corpus(params, corpus, vocab, threads)
    per_token = token_entropies(head_token_means(scan.matrices))
    present = np.flatnonzero(~np.isnan(per_token))
    return EntropyReport(
        num_documents=len(corpus),
        num_heads=params.num_heads,
        avg_doc_entropy=float(scan.doc_entropy.mean()),
        avg_token_entropy=float(per_token[present].mean()) if present.size else None,
        per_head_doc_entropy=[float(e) for e in scan.doc_entropy.mean(axis=0)],
        per_head_vocab_entropy=vocabulary_entropy(scan.matrices),
        token_entropy={vocab.tokens[i]: float(per_token[i]) for i in present},
        num_absent_tokens=int(len(vocab) - present.size),
    )
