"""The minibatch training loop."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from tqdm import tqdm

from ..config import TrainConfig
from ..corpus.vocabulary import Vocabulary
from ..embedding import EmbeddingMatrix, init_random, load_pretrained_vectors
from ..model.forward import forward
from ..model.params import ModelParams, init_params
from ..models import LabeledExample, LabeledSplit
from ..utils.custom_json import append_jsonl
from ..utils.logger import logger
from ..utils.parallel import ordered_map
from .backward import GradientSet, NonFiniteError, backward, mean_gradients
from .checkpoint import save_checkpoint
from .loss import total_loss
from .metrics import evaluate
from .models import EpochRecord, EvaluationResult, LossBreakdown
from .optimizer import AdamState, adam_step, lr_for_epoch

__all__ = ["TrainResult", "build_embedding", "train_step", "train"]


@dataclass(slots=True)
class TrainResult:
    params: ModelParams
    """The parameters of the best epoch."""
    state: AdamState
    """Optimizer state at the best epoch."""
    epochs: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    best_validation: EvaluationResult | None = None


def _dtype(precision: str) -> type:
    return np.float64 if precision == "float64" else np.float32


def build_embedding(config: TrainConfig, vocab: Vocabulary) -> EmbeddingMatrix:
    """Pretrained vectors when configured, else a seeded random matrix."""
    dtype = _dtype(config.precision)
    if config.embedding_path is not None:
        embedding = load_pretrained_vectors(
            config.embedding_path, vocab, config.embedding_dim, config.seed, dtype=dtype
        )
    else:
        embedding = init_random(len(vocab), config.embedding_dim, config.seed, dtype=dtype)
    embedding.trainable = config.trainable_embeddings
    return embedding


def train_step(
    params: ModelParams, example: LabeledExample, lam: float
) -> tuple[LossBreakdown, GradientSet]:
    """Loss and gradients of one example.

    Raises:
        NonFiniteError: If the forward pass or a gradient is not finite.
    """
    record = forward(example.sequence, params)
    if not np.all(np.isfinite(record.log_y)):
        raise NonFiniteError(f"Non-finite class log-probabilities for document {example.doc_id}")
    loss = total_loss(record, example.class_id, lam)
    if not np.isfinite(loss.total):
        raise NonFiniteError(f"Non-finite loss for document {example.doc_id}: {loss}")
    return loss, backward(record, example.class_id, lam, params)


def _checkpoint_metadata(
    config: TrainConfig, split: LabeledSplit, epoch: int, validation: EvaluationResult | None
) -> dict[str, Any]:
    return {
        "config": config.model_dump(
            mode="json", by_alias=True, exclude={"checkpoint_path", "log_path"}
        ),
        "seed": config.seed,
        "epoch": epoch,
        "labels": split.labels,
        "validation": validation.model_dump(mode="json") if validation else None,
    }


def train(
    config: TrainConfig,
    split: LabeledSplit,
    embedding: EmbeddingMatrix,
    threads: int = 1,
) -> TrainResult:
    """Train with Adam, halving the learning rate at every epoch boundary.

    Batches are drawn from a seeded permutation of the training split; the last,
    smaller batch is kept. Per-example gradients are averaged in example order,
    so a run is reproducible at any thread count. After every epoch the model is
    scored on the validation split; the first epoch with the best accuracy is
    kept and checkpointed.

    Args:
        config: Training hyperparameters and output paths.
        split: Encoded corpus.
        embedding: Initial embedding matrix; it is copied, not modified.
        threads: Worker count for per-example forward/backward passes.

    Raises:
        ValueError: If the training split is empty.
        NonFiniteError: If a loss or gradient becomes non-finite.
    """
    if not split.train:
        raise ValueError("The training split is empty")
    dtype = _dtype(config.precision)
    embedding = EmbeddingMatrix(
        matrix=np.array(embedding.matrix, dtype=dtype, copy=True),
        trainable=config.trainable_embeddings,
        coverage=embedding.coverage,
    )
    params = init_params(
        embedding,
        num_classes=split.num_classes,
        num_heads=config.num_heads,
        head_dim=config.head_dim,
        pool_dim=config.pool_dim,
        seed=config.seed + 1,
    )
    state = AdamState.create(params, lr=config.base_lr)
    rng = np.random.default_rng(config.seed + 2)
    if config.log_path is not None:
        config.log_path.write_text("", encoding="utf-8")

    result = TrainResult(params=params.copy(), state=state.copy())
    best_accuracy = -1.0
    n = len(split.train)
    for epoch in range(1, config.epochs + 1):
        state.lr = lr_for_epoch(config.base_lr, epoch)
        order = rng.permutation(n)
        loss_sum = 0.0
        entropy_sum = 0.0
        batches = range(0, n, config.batch_size)
        for start in tqdm(batches, desc=f"epoch {epoch}/{config.epochs}", unit="batch", leave=False):
            batch = [split.train[i] for i in order[start : start + config.batch_size]]
            try:
                steps = ordered_map(lambda e: train_step(params, e, config.lambda_), batch, threads)
            except NonFiniteError as e:
                raise NonFiniteError(f"Epoch {epoch}, batch at {start}: {e}") from e
            for loss, _ in steps:
                loss_sum += loss.total
                entropy_sum += loss.mean_doc_entropy
            adam_step(params, mean_gradients([g for _, g in steps]), state)

        validation = evaluate(params, split.validation, split.num_classes, threads) if split.validation else None
        record = EpochRecord(
            epoch=epoch,
            lr=state.lr,
            train_loss=loss_sum / n,
            val_accuracy=validation.accuracy if validation else None,
            val_macro_f1=validation.macro_f1 if validation else None,
            avg_doc_entropy=entropy_sum / n,
        )
        result.epochs.append(record)
        if config.log_path is not None:
            append_jsonl(record, config.log_path)
        logger.info(
            f"epoch {epoch}: lr={record.lr:.3g} loss={record.train_loss:.4f} "
            f"val_acc={record.val_accuracy} val_f1={record.val_macro_f1} "
            f"E_doc={record.avg_doc_entropy:.4f}"
        )

        # without a validation split the last epoch wins
        accuracy = validation.accuracy if validation else float(epoch)
        if accuracy > best_accuracy:
            best_accuracy = accuracy
            result.params = params.copy()
            result.state = state.copy()
            result.best_epoch = epoch
            result.best_validation = validation
            if config.checkpoint_path is not None:
                save_checkpoint(
                    result.params,
                    result.state,
                    config.checkpoint_path,
                    _checkpoint_metadata(config, split, epoch, validation),
                )
    logger.success(
        f"Training finished; best epoch {result.best_epoch} "
        f"(val_acc={result.best_validation.accuracy if result.best_validation else None})"
    )
    return result
