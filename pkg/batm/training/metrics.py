"""Accuracy, macro-F1 and confusion matrices."""

from typing import Sequence

import numpy as np
from sklearn.metrics import accuracy_score, confusion_matrix, f1_score

from ..model.forward import forward
from ..model.params import ModelParams
from ..models import LabeledExample
from ..utils.parallel import ordered_map
from .models import EvaluationResult

__all__ = ["classification_metrics", "predict", "evaluate"]


def classification_metrics(
    y_true: Sequence[int], y_pred: Sequence[int], num_classes: int
) -> EvaluationResult:
    """Accuracy and macro-F1 over every class id in ``[0, num_classes)``.

    Classes without support or predictions count with F1 = 0.

    Raises:
        ValueError: If there are no examples.
    """
    if len(y_true) == 0:
        raise ValueError("Cannot evaluate on an empty dataset")
    labels = list(range(num_classes))
    per_class = f1_score(y_true, y_pred, labels=labels, average=None, zero_division=0)
    return EvaluationResult(
        accuracy=float(accuracy_score(y_true, y_pred)),
        macro_f1=float(np.mean(per_class)),
        num_examples=len(y_true),
        per_class_f1=[float(f) for f in per_class],
        confusion=confusion_matrix(y_true, y_pred, labels=labels).tolist(),
    )


def predict(params: ModelParams, dataset: Sequence[LabeledExample], threads: int = 1) -> list[int]:
    """Arg-max class of every example, in dataset order."""
    return ordered_map(lambda e: int(np.argmax(forward(e.sequence, params).log_y)), dataset, threads)


def evaluate(
    params: ModelParams,
    dataset: Sequence[LabeledExample],
    num_classes: int | None = None,
    threads: int = 1,
) -> EvaluationResult:
    """Classify every example and score the predictions.

    Args:
        params: Model parameters.
        dataset: Encoded examples.
        num_classes: Size of the label map; defaults to the classifier's class count.
        threads: Worker count for the forward passes.
    """
    if not dataset:
        raise ValueError("Cannot evaluate on an empty dataset")
    y_pred = predict(params, dataset, threads)
    y_true = [e.class_id for e in dataset]
    return classification_metrics(y_true, y_pred, num_classes or params.num_classes)
