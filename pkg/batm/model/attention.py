"""The attention operations of the forward pass.

First level: every head scores the tokens of a document with a one-layer
feed-forward net, normalizes the scores over the unmasked positions and pools
the token embeddings into a head vector. Second level: the head vectors are
scored the same way and pooled into the document vector, which is classified by
a linear-softmax layer.
"""

from typing import NamedTuple

import numpy as np
from scipy.special import log_softmax

from .params import ClassifierParams, HeadParams, ModelParams, PoolParams

__all__ = [
    "HeadLayer",
    "DocumentLayer",
    "masked_softmax",
    "head_scores",
    "head_attention",
    "multi_head",
    "pool_scores",
    "document_attention",
    "log_classify",
    "classify",
]


def masked_softmax(scores: np.ndarray, mask: np.ndarray | None = None) -> np.ndarray:
    """Softmax over the last axis restricted to unmasked positions.

    The maximum live score is subtracted before exponentiation. Masked positions
    get exactly 0.

    Args:
        scores: Scores, any shape; normalized along the last axis.
        mask: Boolean validity mask broadcastable to ``scores``; None means all valid.

    Raises:
        ValueError: If some row has no unmasked position.
    """
    scores = np.asarray(scores)
    if not np.issubdtype(scores.dtype, np.floating):
        scores = scores.astype(np.float64)
    if mask is None:
        mask = np.ones(scores.shape, dtype=bool)
    mask = np.broadcast_to(np.asarray(mask, dtype=bool), scores.shape)
    if not np.all(mask.any(axis=-1)):
        raise ValueError("masked_softmax needs at least one unmasked position per row")

    live = np.where(mask, scores, -np.inf)
    e = np.exp(live - live.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def head_scores(x: np.ndarray, W: np.ndarray, b: np.ndarray, v: np.ndarray):
    """Token scores of stacked heads over valid token embeddings.

    Args:
        x: ``n × E`` embeddings of the unmasked tokens.
        W: ``K × D_k × E``.
        b: ``K × D_k``.
        v: ``K × D_k``.

    Returns:
        ``(T, g)`` with ``T = tanh(W x_i + b)`` of shape ``K × n × D_k`` and the
        scores ``g`` of shape ``K × n``.
    """
    T = np.tanh(x @ W.transpose(0, 2, 1) + b[:, None, :])
    g = (T @ v[:, :, None])[..., 0]
    return T, g


class HeadLayer(NamedTuple):
    """Output of the multi-head layer over one sequence of length N with n unmasked tokens."""

    alpha: np.ndarray
    """``K × N`` token weights (0 at masked positions)."""
    H: np.ndarray
    """``K × E`` head vectors."""
    T: np.ndarray
    """``K × n × D_k`` hidden activations of the unmasked tokens."""
    g: np.ndarray
    """``K × N`` token scores (0 at masked positions)."""


class DocumentLayer(NamedTuple):
    """Output of the attention over head vectors."""

    beta: np.ndarray
    """``K`` head weights summing to 1."""
    d: np.ndarray
    """``E`` document vector ``Σ_k β_k h_k``."""
    S: np.ndarray
    """``K × D_h`` hidden activations."""
    mu: np.ndarray
    """``K`` head scores."""


def _attend(e_seq: np.ndarray, mask: np.ndarray, W: np.ndarray, b: np.ndarray, v: np.ndarray) -> HeadLayer:
    mask = np.asarray(mask, dtype=bool)
    if e_seq.shape[0] != mask.shape[0]:
        raise ValueError(
            f"Sequence length {e_seq.shape[0]} does not match mask length {mask.shape[0]}"
        )
    if not mask.any():
        raise ValueError("Cannot attend over a sequence with every position masked")
    x = e_seq[mask]
    T, g_valid = head_scores(x, W, b, v)
    alpha_valid = masked_softmax(g_valid)
    H = alpha_valid @ x

    K, N = W.shape[0], mask.shape[0]
    g = np.zeros((K, N), dtype=g_valid.dtype)
    g[:, mask] = g_valid
    alpha = np.zeros((K, N), dtype=alpha_valid.dtype)
    alpha[:, mask] = alpha_valid
    return HeadLayer(alpha=alpha, H=H, T=T, g=g)


def head_attention(e_seq: np.ndarray, mask: np.ndarray, p: HeadParams):
    """Attention of a single head over an embedded sequence.

    Args:
        e_seq: ``N × E`` embedded sequence.
        mask: Boolean validity mask of length N.
        p: The head's parameters.

    Returns:
        ``(alpha, h)``: the ``N`` token weights (0 at masked positions) and the
        ``E``-dimensional head vector ``h = Σ_i α_i e_i``.
    """
    layer = _attend(e_seq, mask, p.W[None], p.b[None], p.v[None])
    return layer.alpha[0], layer.H[0]


def multi_head(e_seq: np.ndarray, mask: np.ndarray, params: ModelParams) -> HeadLayer:
    """All K heads over one embedded sequence, in head order."""
    return _attend(e_seq, mask, params.head_W, params.head_b, params.head_v)


def pool_scores(H: np.ndarray, W: np.ndarray, b: np.ndarray, c: np.ndarray):
    """``(S, μ)`` with ``S = tanh(W h_k + b)`` (``K × D_h``) and ``μ = S c`` (``K``)."""
    S = np.tanh(H @ W.T + b)
    return S, S @ c


def document_attention(H: np.ndarray, p: PoolParams) -> DocumentLayer:
    """Additive attention over the head vectors.

    All heads always participate (no mask).

    Raises:
        ValueError: If there are no heads or the shapes do not match.
    """
    if H.ndim != 2 or H.shape[0] < 1:
        raise ValueError(f"Expected a non-empty K × E matrix of head vectors, got {H.shape}")
    if H.shape[1] != p.W.shape[1]:
        raise ValueError(f"Head vectors have dim {H.shape[1]}, pool expects {p.W.shape[1]}")
    S, mu = pool_scores(H, p.W, p.b, p.c)
    beta = masked_softmax(mu)
    return DocumentLayer(beta=beta, d=beta @ H, S=S, mu=mu)


def log_classify(d: np.ndarray, p: ClassifierParams) -> np.ndarray:
    """Log class probabilities ``log softmax(W d + b)``."""
    return log_softmax(p.W @ d + p.b)


def classify(d: np.ndarray, p: ClassifierParams) -> np.ndarray:
    """Class probabilities ``y = softmax(W d + b)``."""
    return np.exp(log_classify(d, p))
