# batm/config.py
"""Experiment configuration.

All knobs live in one flat key space, :class:`ExperimentConfig`. A run's effective
configuration is built in three layers: dataset preset, then the JSON config
file, then ``--set key=value`` overrides. Unknown keys are rejected with a
suggestion for the closest valid key.
"""

import difflib
import json
from pathlib import Path
from typing import Literal, Sequence

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .utils.logger import logger

__all__ = [
    "ConfigError",
    "PRESETS",
    "DEFAULT_SEEDS",
    "ExperimentConfig",
    "TrainConfig",
    "RunConfig",
    "valid_keys",
    "parse_config",
]


DEFAULT_SEEDS = [1, 2, 3, 4, 5]

PRESETS: dict[str, dict[str, object]] = {
    "news26": {
        "num_heads": 30,
        "max_len": 100,
        "text_fields": ["headline", "short_description"],
        "label_field": "category",
    },
    "mind15": {
        "num_heads": 180,
        "max_len": 512,
        "text_fields": ["title", "abstract", "body"],
        "label_field": "category",
    },
    "custom": {},
}
"""Per-dataset defaults applied before the config file and overrides."""


class ConfigError(ValueError):
    """Raised for unknown configuration keys or values of the wrong type."""


class ExperimentConfig(BaseModel):
    """The complete, flat configuration of an experiment."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    # --- corpus ---
    preset: Literal["news26", "mind15", "custom"] = "news26"
    """Dataset preset whose defaults fill absent keys."""
    data_path: Path | None = None
    """JSON-lines corpus file."""
    text_fields: list[str] = Field(default_factory=lambda: ["headline", "short_description"])
    """Record fields concatenated, in order, into the document text."""
    label_field: str = "category"
    id_field: str | None = "id"
    alias_map: Path | None = None
    """Optional TSV file merging duplicated categories."""
    min_count: int = Field(default=1, ge=1)
    max_len: int = Field(default=100, ge=1)
    split_ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    split_seed: int = 42

    # --- embedding ---
    embedding_path: Path | None = None
    """Pretrained word-vector text file; random init when absent."""
    embedding_dim: int = Field(default=300, ge=1)
    trainable_embeddings: bool = True

    # --- model ---
    num_heads: int = Field(default=30, ge=1)
    head_dim: int = Field(default=64, ge=1)
    pool_dim: int = Field(default=64, ge=1)

    # --- training ---
    batch_size: int = Field(default=32, ge=1)
    epochs: int = Field(default=5, ge=1)
    base_lr: float = Field(default=1e-3, gt=0)
    lambda_: float = Field(default=0.0, ge=0, alias="lambda")
    """Weight of the mean per-head document entropy in the loss."""
    seed: int = 1
    seeds: list[int] = Field(default_factory=lambda: list(DEFAULT_SEEDS))
    """Seed list for multi-seed runs."""
    precision: Literal["float32", "float64"] = "float32"
    checkpoint_name: str = "checkpoint.bin"

    # --- topics / coherence ---
    top_t: int = Field(default=25, ge=1)
    topic_corpus: Literal["all", "train", "validation", "test"] = "all"
    descriptor_average: Literal["all", "present"] = "all"
    export_matrices: bool = False
    """Also write every head's document-token matrix as CSV triplets."""
    window_size: int = Field(default=110, ge=1)
    coherence_eps: float = Field(default=1e-12, gt=0)

    # --- sweeps ---
    lambda_list: list[float] = Field(default_factory=lambda: [0.0, 1e-4, 1e-3, 1e-2])
    head_list: list[int] = Field(default_factory=lambda: [10, 20, 30, 50, 100])

    @field_validator("split_ratios")
    @classmethod
    def _ratios_sum_to_one(cls, v: tuple[float, float, float]) -> tuple[float, float, float]:
        if any(r < 0 for r in v) or abs(sum(v) - 1.0) > 1e-9:
            raise ValueError(f"split_ratios must be non-negative and sum to 1, got {v}")
        return v

    @field_validator("lambda_list")
    @classmethod
    def _non_negative_lambdas(cls, v: list[float]) -> list[float]:
        if any(x < 0 for x in v):
            raise ValueError("lambda_list entries must be >= 0")
        return v

    def train_config(self, out_dir: Path | None = None) -> "TrainConfig":
        """The training view of this configuration.

        Args:
            out_dir: Run directory receiving the checkpoint and the epoch log.
        """
        return TrainConfig(
            num_heads=self.num_heads,
            embedding_dim=self.embedding_dim,
            head_dim=self.head_dim,
            pool_dim=self.pool_dim,
            max_len=self.max_len,
            batch_size=self.batch_size,
            epochs=self.epochs,
            base_lr=self.base_lr,
            lambda_=self.lambda_,
            seed=self.seed,
            precision=self.precision,
            trainable_embeddings=self.trainable_embeddings,
            embedding_path=self.embedding_path,
            checkpoint_path=out_dir / self.checkpoint_name if out_dir else None,
            log_path=out_dir / "epoch_log.jsonl" if out_dir else None,
        )

    def echo(self) -> dict:
        """Full effective configuration, keyed by the documented key names."""
        return self.model_dump(mode="json", by_alias=True)


class TrainConfig(BaseModel):
    """Hyperparameters and paths consumed by the training loop."""

    model_config = ConfigDict(populate_by_name=True)

    num_heads: int = Field(default=30, ge=1)
    """K, the number of first-level heads (topics)."""
    embedding_dim: int = Field(default=300, ge=1)
    """E."""
    head_dim: int = Field(default=64, ge=1)
    """D_k."""
    pool_dim: int = Field(default=64, ge=1)
    """D_h."""
    max_len: int = Field(default=100, ge=1)
    batch_size: int = Field(default=32, ge=1)
    epochs: int = Field(default=5, ge=1)
    base_lr: float = Field(default=1e-3, gt=0)
    """Learning rate of the first epoch; halved at every epoch boundary."""
    lambda_: float = Field(default=0.0, ge=0, alias="lambda")
    seed: int = 1
    precision: Literal["float32", "float64"] = "float32"
    trainable_embeddings: bool = True
    embedding_path: Path | None = None
    checkpoint_path: Path | None = None
    """Where the best-validation model is saved; nothing is saved when None."""
    log_path: Path | None = None
    """JSON-lines epoch log; not written when None."""


class RunConfig(BaseModel):
    """One CLI invocation."""

    command: str
    config_path: Path | None = None
    overrides: list[str] = Field(default_factory=list)
    out_dir: Path = Path("runs/default")
    seed: int | None = None
    seeds: list[int] | None = None
    threads: int | None = None
    checkpoint: Path | None = None


def valid_keys() -> list[str]:
    """All documented configuration keys."""
    return [f.alias or name for name, f in ExperimentConfig.model_fields.items()]


def _parse_value(raw: str) -> object:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _check_keys(keys: Sequence[str], source: str):
    allowed = valid_keys()
    for key in keys:
        if key not in allowed:
            close = difflib.get_close_matches(key, allowed, n=1)
            hint = f" Did you mean {close[0]!r}?" if close else ""
            raise ConfigError(
                f"Unknown configuration key {key!r} in {source}.{hint} "
                f"Valid keys: {', '.join(sorted(allowed))}"
            )


def parse_config(path: Path | None = None, overrides: Sequence[str] = ()) -> ExperimentConfig:
    """Build the effective configuration.

    Args:
        path: Optional JSON config file holding an object of documented keys.
        overrides: ``key=value`` strings; values are parsed as JSON literals when
            possible, else kept as strings.

    Returns:
        The validated configuration: preset defaults, then file keys, then overrides.

    Raises:
        FileNotFoundError: If the config file does not exist.
        ConfigError: On malformed files, unknown keys or invalid values.
    """
    raw: dict[str, object] = {}
    if path is not None:
        if not path.is_file():
            raise FileNotFoundError(f"Config file does not exist: {path}")
        try:
            loaded = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config file {path} is not valid JSON: {e.msg}")
        if not isinstance(loaded, dict):
            raise ConfigError(f"Config file {path} must hold a JSON object")
        _check_keys(list(loaded), str(path))
        raw.update(loaded)

    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"Override {item!r} is not of the form key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        _check_keys([key], "--set")
        raw[key] = _parse_value(value.strip())

    preset = raw.get("preset", "news26")
    if preset not in PRESETS:
        raise ConfigError(f"Unknown preset {preset!r}; expected one of {sorted(PRESETS)}")
    merged = {**PRESETS[str(preset)], **raw}

    try:
        config = ExperimentConfig.model_validate(merged)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e

    logger.debug(f"Effective config: {config.echo()}")
    return config
