"""Trainable parameters of the two attention layers and the classifier.

Heads are stored stacked so that all K heads are evaluated with one batched
matrix product; :attr:`ModelParams.heads` exposes per-head views. Every linear
map ``A -> B`` is stored as a ``B × A`` matrix (rows of length A), so
``W_k e_i`` is ``head_W[k] @ e_i``.
"""

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ..embedding import EmbeddingMatrix

__all__ = [
    "TENSOR_NAMES",
    "HeadParams",
    "PoolParams",
    "ClassifierParams",
    "ModelParams",
    "init_params",
    "xavier_bound",
]

TENSOR_NAMES = (
    "embedding",
    "head_W",
    "head_b",
    "head_v",
    "pool_W",
    "pool_b",
    "pool_c",
    "cls_W",
    "cls_b",
)
"""Canonical tensor order, used by the optimizer state and checkpoints."""


@dataclass(slots=True)
class HeadParams:
    """One first-level head: ``g_i = v · tanh(W e_i + b)``."""

    W: np.ndarray
    """``D_k × E``."""
    b: np.ndarray
    """``D_k``."""
    v: np.ndarray
    """``D_k``."""


@dataclass(slots=True)
class PoolParams:
    """Second-level additive attention over head vectors: ``μ_k = c · tanh(W h_k + b)``."""

    W: np.ndarray
    """``D_h × E``."""
    b: np.ndarray
    """``D_h``."""
    c: np.ndarray
    """``D_h``."""


@dataclass(slots=True)
class ClassifierParams:
    """Linear-softmax classifier ``y = softmax(W d + b)``."""

    W: np.ndarray
    """``C × E``."""
    b: np.ndarray
    """``C``."""


@dataclass(slots=True)
class ModelParams:
    """All trainable tensors of the model."""

    embedding: EmbeddingMatrix
    head_W: np.ndarray
    head_b: np.ndarray
    head_v: np.ndarray
    pool_W: np.ndarray
    pool_b: np.ndarray
    pool_c: np.ndarray
    cls_W: np.ndarray
    cls_b: np.ndarray

    def __post_init__(self):
        self.validate()

    @property
    def num_heads(self) -> int:
        return self.head_W.shape[0]

    @property
    def embedding_dim(self) -> int:
        return self.embedding.dim

    @property
    def head_dim(self) -> int:
        return self.head_W.shape[1]

    @property
    def pool_dim(self) -> int:
        return self.pool_W.shape[0]

    @property
    def num_classes(self) -> int:
        return self.cls_W.shape[0]

    @property
    def vocab_size(self) -> int:
        return self.embedding.vocab_size

    @property
    def dtype(self) -> np.dtype:
        return self.head_W.dtype

    @property
    def heads(self) -> list[HeadParams]:
        """Per-head views into the stacked head tensors."""
        return [
            HeadParams(W=self.head_W[k], b=self.head_b[k], v=self.head_v[k])
            for k in range(self.num_heads)
        ]

    @property
    def pool(self) -> PoolParams:
        return PoolParams(W=self.pool_W, b=self.pool_b, c=self.pool_c)

    @property
    def classifier(self) -> ClassifierParams:
        return ClassifierParams(W=self.cls_W, b=self.cls_b)

    def tensors(self) -> dict[str, np.ndarray]:
        """Name -> array for every trainable tensor, in :data:`TENSOR_NAMES` order.

        The arrays are the live parameters, not copies.
        """
        return {
            name: self.embedding.matrix if name == "embedding" else getattr(self, name)
            for name in TENSOR_NAMES
        }

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        return iter(self.tensors().items())

    def copy(self) -> "ModelParams":
        """Deep copy of every tensor."""
        return self.astype(self.dtype)

    def astype(self, dtype: np.dtype | type) -> "ModelParams":
        """Copy of the parameters converted to ``dtype``."""
        t = {name: np.array(a, dtype=dtype, copy=True) for name, a in self.tensors().items()}
        embedding = EmbeddingMatrix(
            matrix=t.pop("embedding"),
            trainable=self.embedding.trainable,
            coverage=self.embedding.coverage,
        )
        return ModelParams(embedding=embedding, **t)

    def validate(self):
        """Check shape consistency and finiteness.

        Raises:
            ValueError: On any inconsistent shape or non-finite entry.
        """
        E = self.embedding.dim
        if self.head_W.ndim != 3 or self.head_W.shape[2] != E:
            raise ValueError(f"head_W must be K × D_k × {E}, got {self.head_W.shape}")
        K, Dk = self.head_W.shape[:2]
        if K < 1:
            raise ValueError("At least one head is required")
        expected = {
            "head_b": (K, Dk),
            "head_v": (K, Dk),
            "pool_b": (self.pool_W.shape[0],),
            "pool_c": (self.pool_W.shape[0],),
            "cls_b": (self.cls_W.shape[0],),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {getattr(self, name).shape}")
        if self.pool_W.ndim != 2 or self.pool_W.shape[1] != E:
            raise ValueError(f"pool_W must be D_h × {E}, got {self.pool_W.shape}")
        if self.cls_W.ndim != 2 or self.cls_W.shape[1] != E:
            raise ValueError(f"cls_W must be C × {E}, got {self.cls_W.shape}")
        for name, array in self.tensors().items():
            if not np.all(np.isfinite(array)):
                raise ValueError(f"Parameter tensor {name} has non-finite entries")


def xavier_bound(fan_in: int, fan_out: int) -> float:
    """Half-width ``sqrt(6 / (fan_in + fan_out))`` of the scaled uniform init."""
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def init_params(
    embedding: EmbeddingMatrix,
    num_classes: int,
    num_heads: int,
    head_dim: int = 64,
    pool_dim: int = 64,
    seed: int = 1,
) -> ModelParams:
    """Initialize the attention and classifier parameters around an embedding.

    Matrices and score vectors are drawn uniformly from ``±sqrt(6/(fan_in+fan_out))``,
    biases start at zero. The dtype follows the embedding matrix.
    """
    if num_classes < 1 or num_heads < 1 or head_dim < 1 or pool_dim < 1:
        raise ValueError("num_classes, num_heads, head_dim and pool_dim must all be >= 1")

    rng = np.random.default_rng(seed)
    dtype = embedding.matrix.dtype
    E = embedding.dim

    def uniform(shape: tuple[int, ...], fan_in: int, fan_out: int) -> np.ndarray:
        a = xavier_bound(fan_in, fan_out)
        return rng.uniform(-a, a, size=shape).astype(dtype)

    return ModelParams(
        embedding=embedding,
        head_W=uniform((num_heads, head_dim, E), E, head_dim),
        head_b=np.zeros((num_heads, head_dim), dtype=dtype),
        head_v=uniform((num_heads, head_dim), head_dim, 1),
        pool_W=uniform((pool_dim, E), E, pool_dim),
        pool_b=np.zeros(pool_dim, dtype=dtype),
        pool_c=uniform((pool_dim,), pool_dim, 1),
        cls_W=uniform((num_classes, E), E, num_classes),
        cls_b=np.zeros(num_classes, dtype=dtype),
    )
