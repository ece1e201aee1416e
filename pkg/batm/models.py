"""Pydantic models for documents and their encoded forms.

This module defines the corpus-level data structures shared by every stage:
raw labeled documents, fixed-length token id sequences with their validity mask,
and the labeled train/validation/test split.
"""

from typing import Iterator

from pydantic import BaseModel, Field, computed_field, model_validator

__all__ = [
    "PAD_ID",
    "UNK_ID",
    "RawDocument",
    "TokenSequence",
    "LabeledExample",
    "LabeledSplit",
    "SPLIT_NAMES",
]

PAD_ID = 0
"""Reserved id of the padding token; embeds to the zero vector."""
UNK_ID = 1
"""Reserved id of the out-of-vocabulary token."""

SPLIT_NAMES = ("train", "validation", "test")


class RawDocument(BaseModel):
    """A labeled document as read from the corpus file."""

    id: str
    """Identifier, unique within a corpus."""
    text: str
    """Concatenation of the configured text fields (e.g. title + abstract + body)."""
    label: str = Field(min_length=1)
    """Category name, after alias merging."""

    model_config = {"frozen": True}


class TokenSequence(BaseModel):
    """A document encoded as exactly ``max_len`` token ids with a validity mask.

    The mask is a prefix of ``True`` followed by ``False``; masked-off positions
    hold :data:`PAD_ID`.
    """

    ids: list[int]
    """Token ids, length ``max_len``."""
    mask: list[bool]
    """Validity mask, length ``max_len``."""

    model_config = {"frozen": True}

    @computed_field
    @property
    def effective_length(self) -> int:
        """Number of valid (unmasked) positions."""
        return sum(self.mask)

    @property
    def max_len(self) -> int:
        return len(self.ids)

    @property
    def valid_ids(self) -> list[int]:
        """Ids of the unmasked prefix."""
        return self.ids[: self.effective_length]

    @model_validator(mode="after")
    def _check_invariants(self) -> "TokenSequence":
        if len(self.ids) != len(self.mask):
            raise ValueError(
                f"ids and mask lengths differ: {len(self.ids)} != {len(self.mask)}"
            )
        n = sum(self.mask)
        if n < 1:
            raise ValueError("A token sequence needs at least one unmasked position")
        if not all(self.mask[:n]) or any(self.mask[n:]):
            raise ValueError("mask must be a prefix of True followed by False")
        if any(i != PAD_ID for i in self.ids[n:]):
            raise ValueError("masked-off positions must hold the PAD id")
        if any(i < 0 for i in self.ids):
            raise ValueError("token ids must be non-negative")
        return self


class LabeledExample(BaseModel):
    """An encoded document paired with its class id."""

    doc_id: str
    sequence: TokenSequence
    class_id: int = Field(ge=0)

    model_config = {"frozen": True}


class LabeledSplit(BaseModel):
    """Deterministic train/validation/test partition of an encoded corpus."""

    train: list[LabeledExample] = Field(default_factory=list)
    validation: list[LabeledExample] = Field(default_factory=list)
    test: list[LabeledExample] = Field(default_factory=list)
    labels: list[str]
    """Label names indexed by class id; ``labels[c]`` is the name of class ``c``."""

    @property
    def label_map(self) -> dict[str, int]:
        """Label name to class id."""
        return {label: i for i, label in enumerate(self.labels)}

    @property
    def num_classes(self) -> int:
        return len(self.labels)

    def part(self, name: str) -> list[LabeledExample]:
        """Return the examples of one split by name ("train", "validation", "test")."""
        if name not in SPLIT_NAMES:
            raise ValueError(f"Unknown split {name!r}; expected one of {SPLIT_NAMES}")
        return getattr(self, name)

    def iter_all(self) -> Iterator[tuple[str, LabeledExample]]:
        """Iterate over ``(split_name, example)`` for every example, split by split."""
        for name in SPLIT_NAMES:
            for example in self.part(name):
                yield name, example

    @model_validator(mode="after")
    def _check_class_ids(self) -> "LabeledSplit":
        c = len(self.labels)
        for name, example in self.iter_all():
            if example.class_id >= c:
                raise ValueError(
                    f"{name} example {example.doc_id!r} has class id {example.class_id} >= {c}"
                )
        return self
