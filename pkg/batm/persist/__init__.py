"""Persistence strategies for run artifacts.

Two strategies are available: a self-describing binary format for model
checkpoints and a single JSON file for pydantic report models.
"""

from .base import PersistStrategy
from .persist_checkpoint import (
    FORMAT_VERSION,
    MAGIC,
    Checkpoint,
    CheckpointError,
    CheckpointHeader,
    CheckpointPersistStrategy,
    OptimizerSnapshot,
    TensorSpec,
)
from .persist_json import SingleJsonFilePersistStrategy
