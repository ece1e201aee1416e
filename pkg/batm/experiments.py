"""Training runs and the experiment drivers built on them.

A run trains one model on a prepared corpus and scores the selected epoch on the
validation and test splits. The drivers repeat runs over a list of entropy
weights, head counts or seeds and tabulate the results.
"""

from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from .config import ExperimentConfig
from .corpus.pipeline import PreparedCorpus
from .persist import SingleJsonFilePersistStrategy
from .topics.entropy import entropy_report
from .training.metrics import evaluate
from .training.models import EpochRecord, EvaluationResult
from .training.trainer import TrainResult, build_embedding, train
from .utils.logger import logger

__all__ = [
    "RunSummary",
    "MetricSummary",
    "SeedSummary",
    "EvalReport",
    "run_training",
    "lambda_sweep",
    "head_sweep",
    "multi_seed",
    "LAMBDA_SWEEP_COLUMNS",
]

LAMBDA_SWEEP_COLUMNS = ["lambda", "accuracy", "macro_f", "avg_E_doc", "avg_E_token"]


class RunSummary(BaseModel):
    """Outcome of one training run."""

    seed: int
    num_heads: int
    lambda_: float = Field(alias="lambda")
    best_epoch: int
    epochs: list[EpochRecord]
    validation: EvaluationResult | None = None
    """Validation metrics of the selected epoch."""
    test: EvaluationResult | None = None
    """Test metrics of the selected epoch."""

    model_config = {"populate_by_name": True}


class EvalReport(BaseModel):
    """Metrics of a saved checkpoint on the validation and test splits."""

    checkpoint: Path
    labels: list[str]
    validation: EvaluationResult | None = None
    test: EvaluationResult | None = None


class MetricSummary(BaseModel):
    mean: float
    std: float
    """Population standard deviation."""

    @classmethod
    def of(cls, values: Sequence[float]) -> "MetricSummary":
        return cls(mean=float(np.mean(values)), std=float(np.std(values)))


class SeedSummary(BaseModel):
    """Mean and spread of the metrics of runs that differ only in their seed."""

    seeds: list[int]
    runs: list[RunSummary]
    metrics: dict[str, MetricSummary] = Field(default_factory=dict)
    """Keyed ``<split>_accuracy`` / ``<split>_macro_f1``."""


def run_training(
    config: ExperimentConfig,
    prepared: PreparedCorpus,
    out_dir: Path,
    threads: int = 1,
) -> tuple[TrainResult, RunSummary]:
    """Train one model into ``out_dir`` and score its best epoch.

    Writes the checkpoint, the epoch log and ``metrics.json``.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    train_config = config.train_config(out_dir)
    embedding = build_embedding(train_config, prepared.vocab)
    result = train(train_config, prepared.split, embedding, threads)
    split = prepared.split
    test = evaluate(result.params, split.test, split.num_classes, threads) if split.test else None
    summary = RunSummary(
        seed=config.seed,
        num_heads=config.num_heads,
        lambda_=config.lambda_,
        best_epoch=result.best_epoch,
        epochs=result.epochs,
        validation=result.best_validation,
        test=test,
    )
    SingleJsonFilePersistStrategy(RunSummary).save(summary, out_dir / "metrics.json")
    return result, summary


def _primary_metrics(summary: RunSummary) -> EvaluationResult:
    metrics = summary.test or summary.validation
    if metrics is None:
        raise ValueError("A run needs a validation or test split to be compared")
    return metrics


def lambda_sweep(
    config: ExperimentConfig,
    prepared: PreparedCorpus,
    lambdas: Sequence[float],
    out_dir: Path,
    threads: int = 1,
) -> pd.DataFrame:
    """Train once per entropy weight and tabulate accuracy against attention entropy.

    Accuracy and macro-F are measured on the test split (validation when there
    is no test split); entropies on the configured topic corpus. One run
    directory ``lambda_<value>`` is created per weight.

    Returns:
        One row per lambda, columns :data:`LAMBDA_SWEEP_COLUMNS`; also written
        to ``lambda_sweep.csv``.
    """
    rows = []
    sequences = [e.sequence for e in prepared.examples_of(config.topic_corpus)]
    for lam in lambdas:
        run_config = config.model_copy(update={"lambda_": float(lam)})
        result, summary = run_training(run_config, prepared, out_dir / f"lambda_{lam:g}", threads)
        metrics = _primary_metrics(summary)
        report = entropy_report(result.params, sequences, prepared.vocab, threads)
        rows.append(
            {
                "lambda": float(lam),
                "accuracy": metrics.accuracy,
                "macro_f": metrics.macro_f1,
                "avg_E_doc": report.avg_doc_entropy,
                "avg_E_token": report.avg_token_entropy,
            }
        )
        logger.info(f"lambda={lam:g}: {rows[-1]}")
    frame = pd.DataFrame(rows, columns=LAMBDA_SWEEP_COLUMNS)
    frame.to_csv(out_dir / "lambda_sweep.csv", index=False)
    return frame


def head_sweep(
    config: ExperimentConfig,
    prepared: PreparedCorpus,
    heads: Sequence[int],
    out_dir: Path,
    threads: int = 1,
) -> pd.DataFrame:
    """Train once per head count; written to ``head_sweep.csv``."""
    rows = []
    for K in heads:
        run_config = config.model_copy(update={"num_heads": int(K)})
        _, summary = run_training(run_config, prepared, out_dir / f"heads_{K}", threads)
        rows.append(
            {
                "num_heads": int(K),
                "val_accuracy": summary.validation.accuracy if summary.validation else None,
                "val_macro_f": summary.validation.macro_f1 if summary.validation else None,
                "test_accuracy": summary.test.accuracy if summary.test else None,
                "test_macro_f": summary.test.macro_f1 if summary.test else None,
            }
        )
        logger.info(f"K={K}: {rows[-1]}")
    frame = pd.DataFrame(rows)
    frame.to_csv(out_dir / "head_sweep.csv", index=False)
    return frame


def multi_seed(
    config: ExperimentConfig,
    prepared: PreparedCorpus,
    seeds: Sequence[int],
    out_dir: Path,
    threads: int = 1,
) -> SeedSummary:
    """One run per seed under ``seed_<n>``; the summary goes to ``seed_summary.json``."""
    if not seeds:
        raise ValueError("At least one seed is required")
    runs = [
        run_training(config.model_copy(update={"seed": int(s)}), prepared, out_dir / f"seed_{s}", threads)[1]
        for s in seeds
    ]
    metrics: dict[str, MetricSummary] = {}
    for split_name in ("validation", "test"):
        results = [getattr(r, split_name) for r in runs]
        if all(r is not None for r in results):
            metrics[f"{split_name}_accuracy"] = MetricSummary.of([r.accuracy for r in results])
            metrics[f"{split_name}_macro_f1"] = MetricSummary.of([r.macro_f1 for r in results])
    summary = SeedSummary(seeds=list(seeds), runs=runs, metrics=metrics)
    SingleJsonFilePersistStrategy(SeedSummary).save(summary, out_dir / "seed_summary.json")
    for name, m in metrics.items():
        logger.info(f"{name}: {m.mean:.4f} ± {m.std:.4f}")
    return summary
