"""Pydantic models for losses, metrics, epoch logs and gradient checks."""

from pydantic import BaseModel, ConfigDict, Field

__all__ = [
    "LossBreakdown",
    "EvaluationResult",
    "EpochRecord",
    "GradCheckReport",
    "GradCheckSummary",
]


class LossBreakdown(BaseModel):
    """Components of the entropy-constrained loss for one document."""

    model_config = ConfigDict(populate_by_name=True)

    ce: float = Field(ge=0)
    """Cross-entropy ``-ln y_label``."""
    per_head_doc_entropy: list[float]
    """Entropy of each head's token weights over the document (natural log)."""
    lambda_: float = Field(ge=0, alias="lambda")
    """Weight of the mean head entropy."""
    total: float
    """``ce + lambda * mean(per_head_doc_entropy)``."""

    @property
    def mean_doc_entropy(self) -> float:
        return sum(self.per_head_doc_entropy) / len(self.per_head_doc_entropy)


class EvaluationResult(BaseModel):
    """Classification quality on one dataset."""

    accuracy: float
    macro_f1: float
    """Unweighted mean of per-class F1 over every class of the label map."""
    num_examples: int
    per_class_f1: list[float] = Field(default_factory=list)
    confusion: list[list[int]] = Field(default_factory=list)
    """``confusion[true][pred]`` counts."""


class EpochRecord(BaseModel):
    """One line of the epoch log."""

    epoch: int
    lr: float
    """Learning rate used during the epoch."""
    train_loss: float
    """Mean total loss over the epoch's training examples."""
    val_accuracy: float | None = None
    val_macro_f1: float | None = None
    avg_doc_entropy: float
    """Mean over training examples and heads of the document entropy."""


class GradCheckReport(BaseModel):
    """Finite-difference check of one (parameters, document, label, lambda) instance."""

    max_rel_error: float
    worst_tensor: str | None = None
    worst_index: list[int] = Field(default_factory=list)
    num_coordinates: int = 0
    lambda_: float = Field(default=0.0, alias="lambda")
    step: float = 1e-5
    shape: dict[str, int] = Field(default_factory=dict)
    """Dimensions of the instance (N, n, K, E, D_k, D_h, C, V)."""

    model_config = ConfigDict(populate_by_name=True)


class GradCheckSummary(BaseModel):
    """Result of a sweep of gradient checks over random tiny configurations."""

    max_rel_error: float
    threshold: float
    passed: bool
    runs: list[GradCheckReport] = Field(default_factory=list)
