"""Binary model checkpoints.

Layout (all integers little-endian)::

    8 bytes   magic  b"BATMCKPT"
    uint32    format version
    uint64    header length in bytes
    header    UTF-8 JSON: dtype, tensor table (name, shape, offset, nbytes),
              embedding flags, optimizer scalars, free-form metadata
    payload   raw little-endian tensors in tensor-table order

Optimizer moments, when present, follow the parameters in the payload under the
names ``adam.m.<tensor>`` and ``adam.v.<tensor>``.
"""

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field

from ..embedding import EmbeddingMatrix
from ..model.params import TENSOR_NAMES, ModelParams
from ..utils.custom_json import dumps
from .base import PersistStrategy

__all__ = [
    "MAGIC",
    "FORMAT_VERSION",
    "CheckpointError",
    "TensorSpec",
    "CheckpointHeader",
    "OptimizerSnapshot",
    "Checkpoint",
    "CheckpointPersistStrategy",
]

MAGIC = b"BATMCKPT"
FORMAT_VERSION = 1
_PREAMBLE = struct.Struct("<8sIQ")
_DTYPES = {"float32": "<f4", "float64": "<f8"}


class CheckpointError(RuntimeError):
    """Raised when a checkpoint file is corrupt, truncated or incompatible."""


class TensorSpec(BaseModel):
    name: str
    shape: list[int]
    offset: int
    """Byte offset into the payload."""
    nbytes: int


class CheckpointHeader(BaseModel):
    """The JSON header of a checkpoint file."""

    dtype: str
    tensors: list[TensorSpec]
    trainable_embeddings: bool = True
    embedding_coverage: float = 0.0
    optimizer: dict[str, float] | None = None
    """``lr``, ``t``, ``beta1``, ``beta2``, ``eps`` when moments are stored."""
    metadata: dict[str, Any] = Field(default_factory=dict)
    """Configuration, seed, epoch and metrics of the saved model."""


@dataclass(slots=True)
class OptimizerSnapshot:
    """Adam scalars and moments as stored in a checkpoint."""

    lr: float
    t: int
    beta1: float
    beta2: float
    eps: float
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]


@dataclass(slots=True)
class Checkpoint:
    params: ModelParams
    optimizer: OptimizerSnapshot | None = None
    metadata: dict[str, Any] = field(default_factory=dict)


class CheckpointPersistStrategy(PersistStrategy[Checkpoint]):
    """Reads and writes the self-describing binary checkpoint format."""

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(version={FORMAT_VERSION})"

    def save(self, data: Checkpoint, path: Path):
        """Write a checkpoint. Identical inputs produce identical bytes.

        Raises:
            ValueError: If path is a directory or parent directory issues.
            FileNotFoundError: If parent directory doesn't exist.
            RuntimeError: If writing fails.
        """
        self.check_target(path)
        dtype = str(data.params.dtype)
        if dtype not in _DTYPES:
            raise ValueError(f"Unsupported checkpoint dtype {dtype}")
        le = np.dtype(_DTYPES[dtype])

        arrays: list[tuple[str, np.ndarray]] = list(data.params.items())
        optimizer = None
        if data.optimizer is not None:
            opt = data.optimizer
            optimizer = {"lr": opt.lr, "t": opt.t, "beta1": opt.beta1, "beta2": opt.beta2, "eps": opt.eps}
            arrays += [(f"adam.m.{name}", opt.m[name]) for name in TENSOR_NAMES]
            arrays += [(f"adam.v.{name}", opt.v[name]) for name in TENSOR_NAMES]

        specs: list[TensorSpec] = []
        chunks: list[bytes] = []
        offset = 0
        for name, array in arrays:
            raw = np.ascontiguousarray(array, dtype=le).tobytes()
            specs.append(TensorSpec(name=name, shape=list(array.shape), offset=offset, nbytes=len(raw)))
            chunks.append(raw)
            offset += len(raw)

        header = CheckpointHeader(
            dtype=dtype,
            tensors=specs,
            trainable_embeddings=data.params.embedding.trainable,
            embedding_coverage=data.params.embedding.coverage,
            optimizer=optimizer,
            metadata=json.loads(dumps(data.metadata)),
        )
        header_bytes = header.model_dump_json().encode("utf-8")
        try:
            with path.open("wb") as f:
                f.write(_PREAMBLE.pack(MAGIC, FORMAT_VERSION, len(header_bytes)))
                f.write(header_bytes)
                for chunk in chunks:
                    f.write(chunk)
        except OSError as e:
            raise RuntimeError(f"Error writing checkpoint {path}: {e}")

    def load(self, path: Path) -> Checkpoint:
        """Read a checkpoint written by :meth:`save`.

        Raises:
            FileNotFoundError: If the file doesn't exist.
            CheckpointError: On bad magic, unknown version, truncation or
                inconsistent tensor shapes.
        """
        self.check_source(path)
        blob = path.read_bytes()
        if len(blob) < _PREAMBLE.size:
            raise CheckpointError(f"Checkpoint {path} is truncated ({len(blob)} bytes)")
        magic, version, header_len = _PREAMBLE.unpack_from(blob)
        if magic != MAGIC:
            raise CheckpointError(f"{path} is not a batm checkpoint (bad magic {magic!r})")
        if version != FORMAT_VERSION:
            raise CheckpointError(
                f"Checkpoint {path} has format version {version}, expected {FORMAT_VERSION}"
            )
        start = _PREAMBLE.size
        if start + header_len > len(blob):
            raise CheckpointError(f"Checkpoint {path} is truncated inside the header")
        try:
            header = CheckpointHeader.model_validate_json(blob[start : start + header_len])
        except ValueError as e:
            raise CheckpointError(f"Checkpoint {path} has a corrupt header: {e}")
        if header.dtype not in _DTYPES:
            raise CheckpointError(f"Checkpoint {path} has unsupported dtype {header.dtype}")

        payload = memoryview(blob)[start + header_len :]
        expected = sum(s.nbytes for s in header.tensors)
        if len(payload) != expected:
            raise CheckpointError(
                f"Checkpoint {path} payload has {len(payload)} bytes, header declares {expected}"
            )

        le = np.dtype(_DTYPES[header.dtype])
        native = np.dtype(header.dtype)
        tensors: dict[str, np.ndarray] = {}
        for entry in header.tensors:
            count = int(np.prod(entry.shape, dtype=np.int64))
            if count * le.itemsize != entry.nbytes:
                raise CheckpointError(
                    f"Tensor {entry.name} in {path}: shape {entry.shape} does not match {entry.nbytes} bytes"
                )
            flat = np.frombuffer(payload, dtype=le, count=count, offset=entry.offset)
            tensors[entry.name] = flat.reshape(entry.shape).astype(native)

        missing = [name for name in TENSOR_NAMES if name not in tensors]
        if missing:
            raise CheckpointError(f"Checkpoint {path} is missing tensors {missing}")
        embedding = EmbeddingMatrix(
            matrix=tensors["embedding"],
            trainable=header.trainable_embeddings,
            coverage=header.embedding_coverage,
        )
        try:
            params = ModelParams(
                embedding=embedding, **{n: tensors[n] for n in TENSOR_NAMES if n != "embedding"}
            )
        except ValueError as e:
            raise CheckpointError(f"Checkpoint {path} has inconsistent shapes: {e}")

        optimizer = None
        if header.optimizer is not None:
            try:
                m = {n: tensors[f"adam.m.{n}"] for n in TENSOR_NAMES}
                v = {n: tensors[f"adam.v.{n}"] for n in TENSOR_NAMES}
            except KeyError as e:
                raise CheckpointError(f"Checkpoint {path} is missing optimizer moment {e}")
            for n, a in params.items():
                if m[n].shape != a.shape or v[n].shape != a.shape:
                    raise CheckpointError(f"Optimizer moments of {n} in {path} do not match {a.shape}")
            opt = header.optimizer
            optimizer = OptimizerSnapshot(
                lr=float(opt["lr"]),
                t=int(opt["t"]),
                beta1=float(opt["beta1"]),
                beta2=float(opt["beta2"]),
                eps=float(opt["eps"]),
                m=m,
                v=v,
            )
        return Checkpoint(params=params, optimizer=optimizer, metadata=header.metadata)
