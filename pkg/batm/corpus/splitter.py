"""Deterministic train/validation/test splitting."""

import math
from typing import Sequence

import numpy as np

from ..models import LabeledExample, LabeledSplit
from ..utils.logger import logger

__all__ = ["DEFAULT_RATIOS", "MIN_DOCUMENTS", "split", "split_sizes"]

DEFAULT_RATIOS = (0.8, 0.1, 0.1)
MIN_DOCUMENTS = 10


def split_sizes(n: int, ratios: Sequence[float]) -> tuple[int, int, int]:
    """Sizes of the three parts: train and validation rounded, test takes the rest."""
    n_train = int(round(n * ratios[0]))
    n_val = int(round(n * ratios[1]))
    n_val = min(n_val, n - n_train)
    return n_train, n_val, n - n_train - n_val


def split(
    examples: Sequence[LabeledExample],
    labels: list[str],
    ratios: Sequence[float] = DEFAULT_RATIOS,
    seed: int = 42,
) -> LabeledSplit:
    """Shuffle by seed, then cut into contiguous train/validation/test parts.

    Args:
        examples: Encoded, labeled documents.
        labels: Label names indexed by class id.
        ratios: Train/validation/test fractions, summing to 1.
        seed: Shuffle seed; the same seed always gives the same split.

    Raises:
        ValueError: If the ratios are invalid or there are fewer than
            :data:`MIN_DOCUMENTS` examples.
    """
    if len(ratios) != 3 or any(r < 0 for r in ratios) or not math.isclose(sum(ratios), 1.0):
        raise ValueError(f"ratios must be three non-negative fractions summing to 1, got {ratios}")
    n = len(examples)
    if n < MIN_DOCUMENTS:
        raise ValueError(f"Need at least {MIN_DOCUMENTS} documents to split, got {n}")

    order = np.random.default_rng(seed).permutation(n)
    shuffled = [examples[i] for i in order]
    n_train, n_val, n_test = split_sizes(n, ratios)

    logger.info(f"Split {n} documents into {n_train}/{n_val}/{n_test} (seed={seed})")
    return LabeledSplit(
        train=shuffled[:n_train],
        validation=shuffled[n_train : n_train + n_val],
        test=shuffled[n_train + n_val :],
        labels=list(labels),
    )
