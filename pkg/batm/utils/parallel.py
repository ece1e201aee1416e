"""Thread-count resolution and an order-preserving parallel map.

Results are always returned in input order, and every reduction over them is
done by the caller in that order, so outputs do not depend on the thread count.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV_VAR = "BATM_THREADS"


def resolve_threads(requested: int | None = None) -> int:
    """Resolve the worker count: explicit value, then ``BATM_THREADS``, then cores.

    Raises:
        ValueError: If the resolved value is not a positive integer.
    """
    if requested is None:
        env_value = os.getenv(THREADS_ENV_VAR)
        if env_value:
            try:
                requested = int(env_value)
            except ValueError:
                raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got {env_value!r}")
        else:
            requested = os.cpu_count() or 1
    if requested < 1:
        raise ValueError(f"Thread count must be >= 1, got {requested}")
    return requested


def ordered_map(fn: Callable[[T], R], items: Sequence[T] | Iterable[T], threads: int = 1) -> list[R]:
    """Apply ``fn`` to every item, in parallel when ``threads > 1``.

    Args:
        fn: Pure function applied to each item.
        items: Input items.
        threads: Worker count; 1 runs inline.

    Returns:
        Results in the same order as ``items``.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))
