"""The full forward pass with every intermediate retained for backpropagation."""

from dataclasses import dataclass

import numpy as np

from ..embedding import lookup
from ..models import TokenSequence
from .attention import document_attention, log_classify, multi_head
from .params import ModelParams

__all__ = ["ForwardRecord", "forward"]


@dataclass(slots=True)
class ForwardRecord:
    """Intermediates of one forward pass over one document.

    ``N`` is the sequence length, ``n`` the number of unmasked positions.
    """

    ids: np.ndarray
    """``N`` token ids."""
    mask: np.ndarray
    """``N`` booleans."""
    x: np.ndarray
    """``n × E`` embeddings of the unmasked tokens."""
    T: np.ndarray
    """``K × n × D_k`` first-level hidden activations ``tanh(W_k e_i + b_k)``."""
    g: np.ndarray
    """``K × N`` token scores (0 at masked positions)."""
    alpha: np.ndarray
    """``K × N`` token weights per head (0 at masked positions)."""
    H: np.ndarray
    """``K × E`` head vectors."""
    S: np.ndarray
    """``K × D_h`` second-level hidden activations ``tanh(W_H h_k + b_H)``."""
    mu: np.ndarray
    """``K`` head scores."""
    beta: np.ndarray
    """``K`` head weights."""
    d: np.ndarray
    """``E`` document vector."""
    log_y: np.ndarray
    """``C`` log class probabilities."""
    y: np.ndarray
    """``C`` class probabilities."""

    @property
    def valid_ids(self) -> np.ndarray:
        return self.ids[self.mask]

    @property
    def alpha_valid(self) -> np.ndarray:
        """``K × n`` token weights restricted to the unmasked positions."""
        return self.alpha[:, self.mask]

    @property
    def effective_length(self) -> int:
        return int(self.mask.sum())


def forward(seq: TokenSequence, params: ModelParams) -> ForwardRecord:
    """Run the model on one document.

    Composes embedding lookup, the multi-head layer, document attention and the
    classifier.

    Raises:
        ValueError: If a token id is outside the vocabulary or shapes mismatch.
    """
    e_seq = lookup(seq, params.embedding)
    mask = np.asarray(seq.mask, dtype=bool)

    heads = multi_head(e_seq, mask, params)
    doc = document_attention(heads.H, params.pool)
    log_y = log_classify(doc.d, params.classifier)

    return ForwardRecord(
        ids=np.asarray(seq.ids, dtype=np.int64),
        mask=mask,
        x=e_seq[mask],
        T=heads.T,
        g=heads.g,
        alpha=heads.alpha,
        H=heads.H,
        S=doc.S,
        mu=doc.mu,
        beta=doc.beta,
        d=doc.d,
        log_y=log_y,
        y=np.exp(log_y),
    )
