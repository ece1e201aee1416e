"""Exact reverse-mode gradients of the entropy-constrained loss.

The backward pass walks the forward graph in reverse: classifier, document
attention, head vectors, token weights (where the entropy term enters), token
scores, head parameters and finally the embedding rows of the document.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..model.forward import ForwardRecord
from ..model.params import TENSOR_NAMES, ModelParams
from ..models import PAD_ID

__all__ = [
    "NonFiniteError",
    "GradientSet",
    "backward",
    "cross_entropy_gradients",
    "entropy_weight_gradient",
    "mean_gradients",
]


class NonFiniteError(FloatingPointError):
    """Raised when a loss or gradient tensor contains NaN or infinity."""


@dataclass(slots=True)
class GradientSet:
    """Gradients for every tensor of :class:`ModelParams`.

    The embedding gradient is kept as (row id, row gradient) pairs since a
    document touches at most ``max_len`` rows; :meth:`dense` scatters it into a
    full ``V × E`` array. Repeated row ids are summed. The PAD row is always zero.
    """

    tensors: dict[str, np.ndarray]
    """Dense gradients of every tensor except the embedding."""
    embedding_rows: np.ndarray
    embedding_values: np.ndarray
    vocab_size: int

    def dense(self, name: str) -> np.ndarray:
        """Dense gradient of one tensor, shape-matched with the parameter."""
        if name != "embedding":
            return self.tensors[name]
        out = np.zeros((self.vocab_size, self.embedding_values.shape[1]), self.embedding_values.dtype)
        np.add.at(out, self.embedding_rows, self.embedding_values)
        out[PAD_ID] = 0
        return out

    def __getitem__(self, name: str) -> np.ndarray:
        return self.dense(name)

    def as_dict(self) -> dict[str, np.ndarray]:
        """All dense gradients in :data:`TENSOR_NAMES` order."""
        return {name: self.dense(name) for name in TENSOR_NAMES}

    def check_finite(self):
        """Raises :class:`NonFiniteError` naming the first non-finite tensor."""
        if not np.all(np.isfinite(self.embedding_values)):
            raise NonFiniteError("Non-finite gradient in tensor 'embedding'")
        for name, g in self.tensors.items():
            if not np.all(np.isfinite(g)):
                raise NonFiniteError(f"Non-finite gradient in tensor {name!r}")


def entropy_weight_gradient(alpha: np.ndarray) -> np.ndarray:
    """Derivative of ``-α ln α`` w.r.t. ``α``, taken as 0 where ``α == 0``."""
    log_alpha = np.log(alpha, out=np.zeros_like(alpha), where=alpha > 0)
    return np.where(alpha > 0, -(log_alpha + 1), 0).astype(alpha.dtype)


def _backprop(
    record: ForwardRecord,
    label: int,
    params: ModelParams,
    dalpha_extra: np.ndarray | None = None,
) -> GradientSet:
    C = params.num_classes
    if not 0 <= label < C:
        raise ValueError(f"Label {label} out of range [0, {C})")

    x, T, H, S = record.x, record.T, record.H, record.S
    beta, d = record.beta, record.d
    alpha = record.alpha_valid

    # classifier: d(-ln y_label)/d logits = y - onehot
    dlogits = record.y.copy()
    dlogits[label] -= 1
    d_cls_W = np.outer(dlogits, d)
    d_cls_b = dlogits
    dd = params.cls_W.T @ dlogits

    # d = Σ β_k h_k
    dbeta = H @ dd
    dH = np.outer(beta, dd)

    # β = softmax(μ), μ = S c, S = tanh(W_H h + b_H)
    dmu = beta * (dbeta - beta @ dbeta)
    d_pool_c = S.T @ dmu
    dU = np.outer(dmu, params.pool_c) * (1 - S * S)
    d_pool_W = dU.T @ H
    d_pool_b = dU.sum(axis=0)
    dH = dH + dU @ params.pool_W

    # h_k = Σ_i α_ik x_i
    dalpha = dH @ x.T
    if dalpha_extra is not None:
        dalpha = dalpha + dalpha_extra
    dx = alpha.T @ dH

    # α^k = softmax(g^k), g = T v, T = tanh(W x + b)
    dg = alpha * (dalpha - (alpha * dalpha).sum(axis=1, keepdims=True))
    d_head_v = (dg[:, None, :] @ T)[:, 0, :]
    dZ = dg[:, :, None] * params.head_v[:, None, :] * (1 - T * T)
    d_head_W = dZ.transpose(0, 2, 1) @ x
    d_head_b = dZ.sum(axis=1)
    dx = dx + (dZ @ params.head_W).sum(axis=0)

    rows = record.valid_ids
    keep = rows != PAD_ID
    grads = GradientSet(
        tensors={
            "head_W": d_head_W,
            "head_b": d_head_b,
            "head_v": d_head_v,
            "pool_W": d_pool_W,
            "pool_b": d_pool_b,
            "pool_c": d_pool_c,
            "cls_W": d_cls_W,
            "cls_b": d_cls_b,
        },
        embedding_rows=rows[keep],
        embedding_values=dx[keep],
        vocab_size=params.vocab_size,
    )
    grads.check_finite()
    return grads


def cross_entropy_gradients(record: ForwardRecord, label: int, params: ModelParams) -> GradientSet:
    """Gradients of the plain cross-entropy loss."""
    return _backprop(record, label, params)


def backward(record: ForwardRecord, label: int, lam: float, params: ModelParams) -> GradientSet:
    """Gradients of ``CE + λ · mean_k E_doc(α^k)`` w.r.t. every trainable tensor.

    Args:
        record: Output of :func:`~batm.model.forward` on ``params``.
        label: True class id.
        lam: Entropy weight; 0 takes exactly the cross-entropy path.
        params: The parameters the record was computed with.

    Raises:
        ValueError: If the label is out of range.
        NonFiniteError: If any gradient tensor is not finite.
    """
    if lam == 0:
        return cross_entropy_gradients(record, label, params)
    scale = lam / params.num_heads
    extra = scale * entropy_weight_gradient(record.alpha_valid)
    return _backprop(record, label, params, dalpha_extra=extra)


def mean_gradients(grads: Sequence[GradientSet]) -> GradientSet:
    """Mean of per-example gradients, reduced in the given (example) order."""
    if not grads:
        raise ValueError("Cannot average an empty list of gradients")
    n = len(grads)
    tensors: dict[str, np.ndarray] = {}
    for name in grads[0].tensors:
        acc = grads[0].tensors[name].copy()
        for g in grads[1:]:
            acc += g.tensors[name]
        tensors[name] = acc / n
    return GradientSet(
        tensors=tensors,
        embedding_rows=np.concatenate([g.embedding_rows for g in grads]),
        embedding_values=np.concatenate([g.embedding_values for g in grads]) / n,
        vocab_size=grads[0].vocab_size,
    )
