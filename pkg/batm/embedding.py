"""Embedding matrix: pretrained word-vector loading, random init and lookup."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus.vocabulary import Vocabulary
from .models import PAD_ID, TokenSequence
from .utils.logger import logger

__all__ = ["INIT_STD", "EmbeddingMatrix", "init_random", "load_pretrained_vectors", "lookup"]

INIT_STD = 0.1
"""Std of the normal distribution used for rows without a pretrained vector."""


@dataclass(slots=True)
class EmbeddingMatrix:
    """A ``V × E`` embedding matrix whose PAD row is all zeros."""

    matrix: np.ndarray
    trainable: bool = True
    coverage: float = 0.0
    """Fraction of corpus-token rows initialized from a pretrained file."""

    @property
    def vocab_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


def init_random(
    vocab_size: int, dim: int, seed: int, dtype: np.dtype | type = np.float32
) -> EmbeddingMatrix:
    """Seeded normal(0, 0.1) embedding matrix with a zero PAD row.

    Raises:
        ValueError: If ``dim < 1`` or ``vocab_size < 1``.
    """
    if dim < 1 or vocab_size < 1:
        raise ValueError(f"Embedding shape must be positive, got ({vocab_size}, {dim})")
    rng = np.random.default_rng(seed)
    matrix = rng.normal(0.0, INIT_STD, size=(vocab_size, dim)).astype(dtype)
    matrix[PAD_ID] = 0
    return EmbeddingMatrix(matrix=matrix)


def load_pretrained_vectors(
    path: Path,
    vocab: Vocabulary,
    dim: int,
    seed: int,
    dtype: np.dtype | type = np.float32,
) -> EmbeddingMatrix:
    """Initialize the embedding matrix from a word-vector text file.

    Each line is ``token f_1 ... f_dim``, whitespace separated. Rows of vocabulary
    tokens found in the file are copied verbatim; the rest (UNK included) keep their
    seeded random init, and PAD is zeroed. When a token occurs twice the first
    vector wins.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If any line does not carry exactly ``dim`` values, or a value
            is not a finite float.
    """
    if not path.is_file():
        raise FileNotFoundError(f"Word-vector file does not exist: {path}")

    embedding = init_random(len(vocab), dim, seed, dtype=dtype)
    found: set[int] = set()
    with path.open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) - 1 != dim:
                raise ValueError(
                    f"{path}:{lineno}: expected {dim} values after the token, got {len(parts) - 1}"
                )
            token_id = vocab.id_of(parts[0]) if parts[0] in vocab else None
            if token_id is None or token_id < 2 or token_id in found:
                continue
            try:
                row = np.asarray(parts[1:], dtype=np.float64)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric vector value")
            if not np.all(np.isfinite(row)):
                raise ValueError(f"{path}:{lineno}: non-finite vector value")
            embedding.matrix[token_id] = row
            found.add(token_id)

    embedding.matrix[PAD_ID] = 0
    embedding.coverage = len(found) / vocab.corpus_size if vocab.corpus_size else 0.0
    logger.info(
        f"Initialized {len(found)}/{vocab.corpus_size} vocabulary rows from {path} "
        f"(coverage {embedding.coverage:.2%})"
    )
    return embedding


def lookup(seq: TokenSequence, emb: EmbeddingMatrix) -> np.ndarray:
    """Embed a token sequence.

    Returns:
        A ``max_len × E`` array; masked-off positions are zero vectors.

    Raises:
        ValueError: If an id is outside the vocabulary (corrupt encoding).
    """
    ids = np.asarray(seq.ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= emb.vocab_size):
        raise ValueError(
            f"Token id out of range [0, {emb.vocab_size}): min {ids.min()}, max {ids.max()}"
        )
    out = emb.matrix[ids]
    out[~np.asarray(seq.mask, dtype=bool)] = 0
    return out
