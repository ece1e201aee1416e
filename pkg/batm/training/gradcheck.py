"""Finite-difference verification of the analytic gradients."""

from typing import Sequence

import numpy as np

from ..embedding import EmbeddingMatrix
from ..model.forward import forward
from ..model.params import ModelParams, init_params
from ..models import PAD_ID, TokenSequence
from ..utils.logger import logger
from .backward import GradientSet, backward
from .loss import total_loss
from .models import GradCheckReport, GradCheckSummary

__all__ = [
    "DEFAULT_THRESHOLD",
    "relative_error",
    "finite_diff_check",
    "random_instance",
    "random_gradcheck",
]

DEFAULT_THRESHOLD = 1e-4


def relative_error(a: float, b: float) -> float:
    """``|a - b| / max(1e-8, |a| + |b|)``."""
    return abs(a - b) / max(1e-8, abs(a) + abs(b))


def _loss(params: ModelParams, seq: TokenSequence, label: int, lam: float) -> float:
    return total_loss(forward(seq, params), label, lam).total


def finite_diff_check(
    params: ModelParams,
    seq: TokenSequence,
    label: int,
    lam: float,
    step: float = 1e-5,
    grads: GradientSet | None = None,
) -> GradCheckReport:
    """Compare analytic gradients with central differences on every coordinate.

    Each coordinate ``θ`` is perturbed in place to ``θ ± step`` and restored.

    Args:
        params: float64 parameters.
        seq: The document.
        label: Its class id.
        lam: Entropy weight.
        step: Finite-difference step.
        grads: Gradients to check; computed with :func:`backward` when None.

    Returns:
        The maximum relative error and where it occurred.

    Raises:
        ValueError: If the parameters are not float64.
    """
    if params.dtype != np.float64:
        raise ValueError(f"Gradient checking requires float64 parameters, got {params.dtype}")
    if grads is None:
        grads = backward(forward(seq, params), label, lam, params)

    worst = GradCheckReport(max_rel_error=0.0, lambda_=lam, step=step)
    count = 0
    for name, tensor in params.tensors().items():
        analytic = grads.dense(name)
        for idx in np.ndindex(tensor.shape):
            original = tensor[idx]
            tensor[idx] = original + step
            f_plus = _loss(params, seq, label, lam)
            tensor[idx] = original - step
            f_minus = _loss(params, seq, label, lam)
            tensor[idx] = original
            numeric = (f_plus - f_minus) / (2 * step)
            err = relative_error(float(analytic[idx]), numeric)
            count += 1
            if err > worst.max_rel_error:
                worst.max_rel_error = err
                worst.worst_tensor = name
                worst.worst_index = [int(i) for i in idx]
    worst.num_coordinates = count
    return worst


def random_instance(
    rng: np.random.Generator,
) -> tuple[ModelParams, TokenSequence, int, dict[str, int]]:
    """A random tiny float64 instance: N<=5, K<=3, E<=4, D_k, D_h<=3, C<=3."""
    N = int(rng.integers(1, 6))
    n = int(rng.integers(1, N + 1))
    K = int(rng.integers(1, 4))
    E = int(rng.integers(1, 5))
    Dk = int(rng.integers(1, 4))
    Dh = int(rng.integers(1, 4))
    C = int(rng.integers(2, 4))
    V = int(rng.integers(3, 9))

    matrix = rng.normal(0.0, 1.0, size=(V, E))
    matrix[PAD_ID] = 0
    params = init_params(
        EmbeddingMatrix(matrix=matrix),
        num_classes=C,
        num_heads=K,
        head_dim=Dk,
        pool_dim=Dh,
        seed=int(rng.integers(0, 2**31)),
    )
    # non-zero biases so their gradients are exercised away from the origin
    params.head_b[...] = rng.normal(0.0, 0.5, size=params.head_b.shape)
    params.pool_b[...] = rng.normal(0.0, 0.5, size=params.pool_b.shape)
    params.cls_b[...] = rng.normal(0.0, 0.5, size=params.cls_b.shape)

    ids = [int(i) for i in rng.integers(1, V, size=n)] + [PAD_ID] * (N - n)
    seq = TokenSequence(ids=ids, mask=[True] * n + [False] * (N - n))
    label = int(rng.integers(0, C))
    shape = {"N": N, "n": n, "K": K, "E": E, "D_k": Dk, "D_h": Dh, "C": C, "V": V}
    return params, seq, label, shape


def random_gradcheck(
    num_configs: int = 20,
    lambdas: Sequence[float] = (0.0, 1e-3),
    seed: int = 0,
    step: float = 1e-5,
    threshold: float = DEFAULT_THRESHOLD,
) -> GradCheckSummary:
    """Run :func:`finite_diff_check` over random tiny configurations.

    Every configuration is checked at every lambda.
    """
    rng = np.random.default_rng(seed)
    runs: list[GradCheckReport] = []
    for i in range(num_configs):
        params, seq, label, shape = random_instance(rng)
        for lam in lambdas:
            report = finite_diff_check(params, seq, label, lam, step=step)
            report.shape = shape
            runs.append(report)
            logger.debug(
                f"gradcheck config {i} lambda={lam}: max rel error {report.max_rel_error:.3e} "
                f"at {report.worst_tensor}{report.worst_index}"
            )
    max_err = max(r.max_rel_error for r in runs)
    return GradCheckSummary(
        max_rel_error=max_err, threshold=threshold, passed=max_err < threshold, runs=runs
    )
