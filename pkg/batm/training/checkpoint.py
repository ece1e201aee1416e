"""Saving and restoring trained models with their optimizer state."""

from pathlib import Path
from typing import Any

import numpy as np

from ..model.params import ModelParams
from ..persist import Checkpoint, CheckpointPersistStrategy
from ..utils.logger import logger
from .optimizer import AdamState

__all__ = ["save_checkpoint", "load_checkpoint"]


def save_checkpoint(
    params: ModelParams,
    state: AdamState | None,
    path: Path,
    metadata: dict[str, Any] | None = None,
):
    """Write parameters, optional Adam state and metadata to ``path``."""
    snapshot = state.to_snapshot() if state is not None else None
    CheckpointPersistStrategy().save(
        Checkpoint(params=params, optimizer=snapshot, metadata=metadata or {}), path
    )
    logger.debug(f"Saved checkpoint to {path}")


def load_checkpoint(
    path: Path, dtype: np.dtype | type | None = None
) -> tuple[ModelParams, AdamState | None, dict[str, Any]]:
    """Read a checkpoint, optionally converting it to ``dtype``.

    A 64-bit checkpoint loaded as float32 is rounded to nearest with a warning;
    a 32-bit checkpoint loaded as float64 is widened exactly.

    Raises:
        FileNotFoundError: If the file does not exist.
        CheckpointError: If the file is corrupt or incompatible.
    """
    ckpt = CheckpointPersistStrategy().load(path)
    params = ckpt.params
    state = AdamState.from_snapshot(ckpt.optimizer) if ckpt.optimizer is not None else None

    if dtype is not None and np.dtype(dtype) != params.dtype:
        target = np.dtype(dtype)
        if target.itemsize < params.dtype.itemsize:
            logger.warning(
                f"Down-converting checkpoint {path} from {params.dtype} to {target}; "
                "values are rounded to the nearest representable number"
            )
        else:
            logger.info(f"Widening checkpoint {path} from {params.dtype} to {target}")
        params = params.astype(target)
        if state is not None:
            state = state.astype(target)
    return params, state, ckpt.metadata
