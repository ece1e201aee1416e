"""Boolean sliding-window counting over tokenized documents."""

from itertools import combinations
from typing import Iterable, Sequence

from ..utils.parallel import ordered_map
from .models import WindowCounts

__all__ = ["DEFAULT_WINDOW_SIZE", "iter_windows", "count_document", "build_window_counts"]

DEFAULT_WINDOW_SIZE = 110


def iter_windows(tokens: Sequence[str], s: int):
    """Windows of ``s`` consecutive tokens with stride 1.

    A document of at most ``s`` tokens is one window; an empty one has none.
    Windows never span documents.
    """
    if not tokens:
        return
    if len(tokens) <= s:
        yield tokens
        return
    for start in range(len(tokens) - s + 1):
        yield tokens[start : start + s]


def count_document(tokens: Sequence[str], tracked: frozenset[str], s: int) -> WindowCounts:
    """Window counts of a single document."""
    counts = WindowCounts(window_size=s)
    for window in iter_windows(tokens, s):
        counts.num_windows += 1
        present = sorted(tracked.intersection(window))
        counts.freq.update(present)
        counts.pair_freq.update(frozenset(p) for p in combinations(present, 2))
    return counts


def build_window_counts(
    documents: Sequence[Sequence[str]],
    tracked: Iterable[str],
    s: int = DEFAULT_WINDOW_SIZE,
    threads: int = 1,
) -> WindowCounts:
    """Count in how many windows each tracked token and token pair occurs.

    Args:
        documents: Token lists, one per document.
        tracked: Tokens whose (pair) frequencies are recorded.
        s: Window size.
        threads: Worker count; per-document counts are merged in document order.

    Raises:
        ValueError: If ``s < 1`` or the corpus yields no window.
    """
    if s < 1:
        raise ValueError(f"Window size must be >= 1, got {s}")
    tracked_set = frozenset(tracked)
    total = WindowCounts(window_size=s)
    for counts in ordered_map(lambda doc: count_document(doc, tracked_set, s), documents, threads):
        total.merge(counts)
    if total.num_windows == 0:
        raise ValueError("Cannot count windows of an empty corpus")
    return total
