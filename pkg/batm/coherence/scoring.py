"""NPMI, C_v and the coherence report."""

import math
from typing import Sequence

import numpy as np
import pandas as pd

from ..topics.models import TopicDescriptor
from ..utils.logger import logger
from .models import CoherenceResult, TopicCoherence, WindowCounts
from .windows import DEFAULT_WINDOW_SIZE, build_window_counts

__all__ = [
    "DEFAULT_EPS",
    "npmi",
    "context_vectors",
    "cv_score",
    "topic_coherence",
    "coherence_report",
    "format_coherence_table",
]

DEFAULT_EPS = 1e-12


def npmi(w_i: str, w_j: str, counts: WindowCounts, eps: float = DEFAULT_EPS) -> float:
    """Normalized pointwise mutual information of two tokens over the windows.

    ``ln((p_ij + eps) / (p_i p_j)) / -ln(p_ij + eps)``. A pair found in every
    window scores 1.

    Raises:
        ValueError: If either token never occurs.
    """
    f_i, f_j = counts.frequency(w_i), counts.frequency(w_j)
    if f_i == 0 or f_j == 0:
        raise ValueError(f"NPMI is undefined for a token that never occurs ({w_i!r}, {w_j!r})")
    W = counts.num_windows
    p_joint = counts.joint(w_i, w_j) / W + eps
    if p_joint >= 1:
        return 1.0
    return math.log(p_joint / ((f_i / W) * (f_j / W))) / -math.log(p_joint)


def context_vectors(words: Sequence[str], counts: WindowCounts, eps: float = DEFAULT_EPS) -> np.ndarray:
    """``len(words) × len(words)`` matrix whose row w is ``(npmi(w, v))_v``."""
    n = len(words)
    U = np.empty((n, n))
    for i in range(n):
        U[i, i] = npmi(words[i], words[i], counts, eps)
        for j in range(i + 1, n):
            U[i, j] = U[j, i] = npmi(words[i], words[j], counts, eps)
    return U


def _cosines(U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cosine of every row with the row sum, and which rows were all-zero."""
    total = U.sum(axis=0)
    norms = np.linalg.norm(U, axis=1)
    total_norm = np.linalg.norm(total)
    zero = (norms == 0) | (total_norm == 0)
    cos = np.divide(U @ total, norms * total_norm, out=np.zeros(len(U)), where=~zero)
    return cos, zero


def cv_score(words: Sequence[str], counts: WindowCounts, eps: float = DEFAULT_EPS) -> float:
    """C_v of a topic: mean cosine between each word's NPMI vector and their sum.

    Raises:
        ValueError: If fewer than two words, or a word that never occurs, are given.
    """
    if len(words) < 2:
        raise ValueError(f"C_v needs at least two words, got {len(words)}")
    cos, _ = _cosines(context_vectors(words, counts, eps))
    return float(cos.mean())


def topic_coherence(
    descriptor: TopicDescriptor, counts: WindowCounts, T: int, eps: float = DEFAULT_EPS
) -> TopicCoherence:
    """Score the top-T words of one descriptor, skipping words absent from the corpus."""
    top = descriptor.words[:T]
    words = [w for w in top if counts.frequency(w) > 0]
    missing = [w for w in top if counts.frequency(w) == 0]
    if len(words) < 2:
        logger.warning(f"Head {descriptor.head}: fewer than 2 usable words, no C_v")
        return TopicCoherence(head=descriptor.head, cv=None, words=words, missing_words=missing)
    cos, zero = _cosines(context_vectors(words, counts, eps))
    flagged = [w for w, z in zip(words, zero) if z]
    if flagged:
        logger.warning(f"Head {descriptor.head}: all-zero context vectors for {flagged}")
    return TopicCoherence(
        head=descriptor.head,
        cv=float(cos.mean()),
        words=words,
        missing_words=missing,
        zero_vector_words=flagged,
    )


def coherence_report(
    descriptors: Sequence[TopicDescriptor],
    corpus: Sequence[Sequence[str]],
    s: int = DEFAULT_WINDOW_SIZE,
    T: int = 25,
    eps: float = DEFAULT_EPS,
    threads: int = 1,
) -> CoherenceResult:
    """C_v of every descriptor over sliding windows of the given corpus.

    Raises:
        ValueError: If there are no descriptors or the corpus is empty.
    """
    if not descriptors:
        raise ValueError("No topic descriptors to score")
    tracked = {w for d in descriptors for w in d.words[:T]}
    counts = build_window_counts(corpus, tracked, s, threads)
    topics = [topic_coherence(d, counts, T, eps) for d in descriptors]
    result = CoherenceResult(topics=topics, window_size=s, num_windows=counts.num_windows)
    if result.absent_heads:
        logger.warning(f"Heads without a C_v score: {result.absent_heads}")
    return result


def format_coherence_table(result: CoherenceResult, max_terms: int = 10) -> str:
    """Plain-text table of heads, their C_v and leading words, best topic first."""
    rows = sorted(result.topics, key=lambda t: (t.cv is None, -(t.cv or 0.0), t.head))
    frame = pd.DataFrame(
        {
            "head": [t.head for t in rows],
            "C_v": ["-" if t.cv is None else f"{t.cv:.4f}" for t in rows],
            "terms": [" ".join(t.words[:max_terms]) for t in rows],
        }
    )
    average = "-" if result.average_cv is None else f"{result.average_cv:.4f}"
    return f"{frame.to_string(index=False, justify='left')}\n\naverage C_v: {average}\n"
