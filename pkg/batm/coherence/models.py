"""Data types of the C_v coherence computation."""

from collections import Counter
from dataclasses import dataclass, field

from pydantic import BaseModel, Field, computed_field

__all__ = ["WindowCounts", "TopicCoherence", "CoherenceResult"]


@dataclass(slots=True)
class WindowCounts:
    """Boolean sliding-window occurrence counts of the tracked tokens."""

    window_size: int
    num_windows: int = 0
    freq: Counter[str] = field(default_factory=Counter)
    """Number of windows containing each tracked token."""
    pair_freq: Counter[frozenset[str]] = field(default_factory=Counter)
    """Number of windows containing both tokens of an unordered pair."""

    def frequency(self, token: str) -> int:
        return self.freq[token]

    def joint(self, a: str, b: str) -> int:
        """Windows containing both ``a`` and ``b``; ``joint(a, a) == frequency(a)``."""
        if a == b:
            return self.freq[a]
        return self.pair_freq[frozenset((a, b))]

    def merge(self, other: "WindowCounts"):
        self.num_windows += other.num_windows
        self.freq.update(other.freq)
        self.pair_freq.update(other.pair_freq)


class TopicCoherence(BaseModel):
    head: int
    cv: float | None
    """C_v of the topic; None when fewer than two of its words occur in the corpus."""
    words: list[str]
    """The topic words scored (those occurring in at least one window)."""
    missing_words: list[str] = Field(default_factory=list)
    """Topic words that never occur in any window."""
    zero_vector_words: list[str] = Field(default_factory=list)
    """Words whose context vector is all zeros; each contributed cosine 0."""


class CoherenceResult(BaseModel):
    topics: list[TopicCoherence]
    window_size: int
    num_windows: int

    @computed_field
    @property
    def average_cv(self) -> float | None:
        """Arithmetic mean of the scored topics' C_v."""
        scores = [t.cv for t in self.topics if t.cv is not None]
        return sum(scores) / len(scores) if scores else None

    @property
    def absent_heads(self) -> list[int]:
        return [t.head for t in self.topics if t.cv is None]
