"""Cross-entropy, per-head document entropy and the combined loss."""

import numpy as np
from scipy.special import entr

from ..model.forward import ForwardRecord
from .models import LossBreakdown

__all__ = ["cross_entropy", "doc_entropy", "head_doc_entropies", "total_loss"]


def _check_label(record: ForwardRecord, label: int):
    if not 0 <= label < record.log_y.shape[0]:
        raise ValueError(f"Label {label} out of range [0, {record.log_y.shape[0]})")


def cross_entropy(record: ForwardRecord, label: int) -> float:
    """``-ln y_label``, read off the stable log-probabilities.

    Raises:
        ValueError: If the label is outside ``[0, C)``.
    """
    _check_label(record, label)
    return float(-record.log_y[label])


def doc_entropy(alpha: np.ndarray, mask: np.ndarray) -> float:
    """Entropy ``-Σ α_i ln α_i`` over the unmasked positions, with ``0 ln 0 = 0``."""
    alpha = np.asarray(alpha)
    return float(entr(alpha[np.asarray(mask, dtype=bool)]).sum())


def head_doc_entropies(record: ForwardRecord) -> np.ndarray:
    """Document entropy of every head, shape ``K``."""
    return entr(record.alpha_valid).sum(axis=1)


def total_loss(record: ForwardRecord, label: int, lam: float) -> LossBreakdown:
    """Entropy-constrained loss ``CE + λ · mean_k E_doc(α^k)``.

    With ``lam == 0`` the total equals the cross-entropy exactly.

    Raises:
        ValueError: If ``lam < 0`` or the label is out of range.
    """
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    ce = cross_entropy(record, label)
    entropies = [float(e) for e in head_doc_entropies(record)]
    total = ce + lam * (sum(entropies) / len(entropies)) if lam else ce
    return LossBreakdown(ce=ce, per_head_doc_entropy=entropies, lambda_=lam, total=total)
