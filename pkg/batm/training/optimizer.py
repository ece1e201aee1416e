"""Adam with bias correction, applied to every tensor of :class:`ModelParams`."""

from dataclasses import dataclass, field

import numpy as np

from ..model.params import ModelParams
from ..models import PAD_ID
from ..persist.persist_checkpoint import OptimizerSnapshot
from .backward import GradientSet

__all__ = ["AdamState", "adam_step", "lr_for_epoch"]


def _rows_with_moments(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.any(m != 0, axis=1) | np.any(v != 0, axis=1)


@dataclass(slots=True)
class AdamState:
    """First and second moment accumulators, one pair per parameter tensor."""

    lr: float
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0
    """Number of steps taken so far."""
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    live_rows: np.ndarray | None = None
    """Embedding rows that ever received a gradient. The other rows have zero
    moments, so their Adam step is exactly zero and they are skipped."""

    @classmethod
    def create(cls, params: ModelParams, lr: float) -> "AdamState":
        """Zero moments shape-matched with ``params``."""
        tensors = params.tensors()
        return cls(
            lr=lr,
            m={name: np.zeros_like(a) for name, a in tensors.items()},
            v={name: np.zeros_like(a) for name, a in tensors.items()},
            live_rows=np.zeros(params.vocab_size, dtype=bool),
        )

    def embedding_rows(self) -> np.ndarray:
        """The live-row mask, rebuilt from the moments when it is not tracked yet."""
        if self.live_rows is None:
            self.live_rows = _rows_with_moments(self.m["embedding"], self.v["embedding"])
        return self.live_rows

    def copy(self) -> "AdamState":
        return AdamState(
            lr=self.lr,
            m={k: a.copy() for k, a in self.m.items()},
            v={k: a.copy() for k, a in self.v.items()},
            t=self.t,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
            live_rows=None if self.live_rows is None else self.live_rows.copy(),
        )

    def astype(self, dtype: np.dtype | type) -> "AdamState":
        state = self.copy()
        state.m = {k: a.astype(dtype) for k, a in state.m.items()}
        state.v = {k: a.astype(dtype) for k, a in state.v.items()}
        return state

    def to_snapshot(self) -> OptimizerSnapshot:
        return OptimizerSnapshot(
            lr=self.lr, t=self.t, beta1=self.beta1, beta2=self.beta2, eps=self.eps, m=self.m, v=self.v
        )

    @classmethod
    def from_snapshot(cls, snapshot: OptimizerSnapshot) -> "AdamState":
        return cls(
            lr=snapshot.lr,
            m=snapshot.m,
            v=snapshot.v,
            t=snapshot.t,
            beta1=snapshot.beta1,
            beta2=snapshot.beta2,
            eps=snapshot.eps,
        )


def lr_for_epoch(base_lr: float, epoch: int) -> float:
    """Learning rate of a 1-based epoch: halved at every epoch boundary."""
    return base_lr * 0.5 ** (epoch - 1)


def _update(theta: np.ndarray, g: np.ndarray, m: np.ndarray, v: np.ndarray, state: AdamState, bc1, bc2):
    m *= state.beta1
    m += (1 - state.beta1) * g
    v *= state.beta2
    v += (1 - state.beta2) * g * g
    theta -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)


def _embedding_step(params: ModelParams, grads: GradientSet, state: AdamState, bc1, bc2):
    theta = params.embedding.matrix
    touched = grads.embedding_rows[grads.embedding_rows != PAD_ID]
    values = grads.embedding_values[grads.embedding_rows != PAD_ID]

    live = state.embedding_rows()
    live[touched] = True
    live[PAD_ID] = False
    rows = np.flatnonzero(live)

    g = np.zeros((rows.size, theta.shape[1]), dtype=values.dtype)
    np.add.at(g, np.searchsorted(rows, touched), values)
    m, v, sub = state.m["embedding"][rows], state.v["embedding"][rows], theta[rows]
    _update(sub, g, m, v, state, bc1, bc2)
    state.m["embedding"][rows] = m
    state.v["embedding"][rows] = v
    theta[rows] = sub
    theta[PAD_ID] = 0


def adam_step(
    params: ModelParams, grads: GradientSet, state: AdamState
) -> tuple[ModelParams, AdamState]:
    """One in-place Adam update of every tensor.

    The step counter is incremented before the bias corrections are computed.
    A frozen embedding is skipped entirely; the PAD row is never moved. Only the
    live rows of the embedding are touched, with the same result as a dense update.

    Returns:
        The same ``params`` and ``state`` objects, updated.
    """
    state.t += 1
    bc1 = 1 - state.beta1**state.t
    bc2 = 1 - state.beta2**state.t

    for name, theta in params.tensors().items():
        if name != "embedding":
            _update(theta, grads.dense(name), state.m[name], state.v[name], state, bc1, bc2)
        elif params.embedding.trainable:
            _embedding_step(params, grads, state, bc1, bc2)
    return params, state
