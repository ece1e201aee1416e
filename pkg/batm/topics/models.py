"""Pydantic models for topic descriptors and entropy reports."""

from pydantic import BaseModel, Field

__all__ = ["TopicTerm", "TopicDescriptor", "EntropyReport"]


class TopicTerm(BaseModel):
    token: str
    weight: float
    """Column mean of the head's document-token matrix."""


class TopicDescriptor(BaseModel):
    """The top-weighted alphabetic tokens of one head."""

    head: int
    terms: list[TopicTerm] = Field(default_factory=list)
    """Ranked by non-increasing weight, ties broken lexicographically."""
    head_usage: float | None = None
    """Mean document-level weight β of this head over the corpus."""

    @property
    def words(self) -> list[str]:
        return [t.token for t in self.terms]


class EntropyReport(BaseModel):
    """Document-level and token-level attention entropy of a model on a corpus."""

    num_documents: int
    num_heads: int
    avg_doc_entropy: float
    """Mean over (document, head) of the entropy of the head's token weights."""
    avg_token_entropy: float | None
    """Mean over attended tokens of the entropy of their head distribution."""
    per_head_doc_entropy: list[float]
    """Mean document entropy of every head."""
    per_head_vocab_entropy: list[float]
    """Entropy of every head's mean weight distribution over the vocabulary."""
    token_entropy: dict[str, float] = Field(default_factory=dict)
    """Token-level entropy of every attended token, keyed by token string."""
    num_absent_tokens: int = 0
    """Vocabulary entries never attended in the corpus."""
