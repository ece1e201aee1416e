"""Per-head document-token attention matrices."""

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy import sparse
from scipy.special import entr

from ..corpus.vocabulary import Vocabulary
from ..model.forward import forward
from ..model.params import ModelParams
from ..models import TokenSequence
from ..utils.parallel import ordered_map

__all__ = ["Average", "TopicMatrix", "CorpusScan", "scan_corpus", "build_topic_matrices"]

Average = Literal["all", "present"]


@dataclass(slots=True)
class TopicMatrix:
    """``D × V`` matrix of head ``head``: entry (d, v) sums the weights of token v in document d."""

    head: int
    matrix: sparse.csr_matrix

    @property
    def num_documents(self) -> int:
        return self.matrix.shape[0]

    @property
    def vocab_size(self) -> int:
        return self.matrix.shape[1]

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def column_means(self, average: Average = "all") -> np.ndarray:
        """Mean weight of every token.

        Args:
            average: ``"all"`` divides by the number of documents; ``"present"``
                divides by the number of documents containing the token.
        """
        sums = np.asarray(self.matrix.sum(axis=0)).ravel()
        if average == "all":
            return sums / self.num_documents
        counts = self.matrix.getnnz(axis=0)
        return np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)

    def triplets(self, doc_ids: Sequence[str] | None = None) -> list[tuple[str | int, int, float]]:
        """``(doc, token_id, weight)`` for every stored entry, row by row."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [
            (doc_ids[r] if doc_ids is not None else int(r), int(c), float(w))
            for r, c, w in zip(coo.row[order], coo.col[order], coo.data[order])
        ]


@dataclass(slots=True)
class CorpusScan:
    """What one forward pass over a corpus yields for topic analysis."""

    matrices: list[TopicMatrix]
    doc_entropy: np.ndarray
    """``D × K`` entropy of every head's token weights per document."""
    effective_lengths: np.ndarray
    head_usage: np.ndarray
    """``K`` mean head weight β over the corpus."""


def _document_weights(params: ModelParams, seq: TokenSequence):
    record = forward(seq, params)
    return record.valid_ids, record.alpha_valid, record.beta


def scan_corpus(
    params: ModelParams,
    corpus: Sequence[TokenSequence],
    vocab: Vocabulary | None = None,
    threads: int = 1,
) -> CorpusScan:
    """Run the model over a corpus and collect per-head token weights.

    Every document's token weights are scatter-added into its own row, so repeated
    tokens are summed into one column and masked positions contribute nothing.

    Raises:
        ValueError: If the corpus is empty or the vocabulary does not match the
            embedding matrix.
    """
    if not corpus:
        raise ValueError("Cannot build topic matrices of an empty corpus")
    V = params.vocab_size
    if vocab is not None and len(vocab) != V:
        raise ValueError(
            f"Vocabulary has {len(vocab)} entries but the embedding matrix has {V} rows"
        )
    docs = ordered_map(lambda s: _document_weights(params, s), corpus, threads)

    K, D = params.num_heads, len(corpus)
    rows = np.concatenate([np.full(len(ids), d, dtype=np.int64) for d, (ids, _, _) in enumerate(docs)])
    cols = np.concatenate([ids for ids, _, _ in docs])
    weights = np.concatenate([alpha for _, alpha, _ in docs], axis=1)
    matrices = [
        TopicMatrix(
            head=k,
            matrix=sparse.coo_matrix((weights[k], (rows, cols)), shape=(D, V)).tocsr(),
        )
        for k in range(K)
    ]
    return CorpusScan(
        matrices=matrices,
        doc_entropy=np.stack([entr(alpha).sum(axis=1) for _, alpha, _ in docs]),
        effective_lengths=np.array([len(ids) for ids, _, _ in docs]),
        head_usage=np.mean([beta for _, _, beta in docs], axis=0),
    )


def build_topic_matrices(
    params: ModelParams,
    corpus: Sequence[TokenSequence],
    vocab: Vocabulary | None = None,
    threads: int = 1,
) -> list[TopicMatrix]:
    """The K document-token matrices of a corpus, one per head."""
    return scan_corpus(params, corpus, vocab, threads).matrices
