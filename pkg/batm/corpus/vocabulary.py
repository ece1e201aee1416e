"""Vocabulary construction and document encoding."""

from collections import Counter
from typing import Iterable

from pydantic import BaseModel, Field, PrivateAttr, model_validator

from ..models import PAD_ID, UNK_ID, RawDocument, TokenSequence
from ..utils.logger import logger
from .tokenizer import is_alphabetic, tokenize

__all__ = ["PAD_TOKEN", "UNK_TOKEN", "Vocabulary", "build_vocabulary", "encode"]

PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"


class Vocabulary(BaseModel):
    """Bijective token <-> id map with corpus frequencies.

    Ids 0 and 1 are reserved for PAD and UNK. Corpus tokens start at id 2, in
    descending frequency then lexicographic order. The reserved tokens contain
    ``<`` and ``>`` which the tokenizer never emits, so they cannot collide with
    corpus tokens.
    """

    tokens: list[str]
    """Id-to-token list, including the two reserved entries."""
    frequencies: list[int]
    """Corpus frequency per id (0 for the reserved entries)."""
    min_count: int = Field(default=1, ge=1)
    """Frequency cutoff the vocabulary was built with."""

    _index: dict[str, int] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _check_and_index(self) -> "Vocabulary":
        if self.tokens[:2] != [PAD_TOKEN, UNK_TOKEN]:
            raise ValueError("Vocabulary must start with the PAD and UNK entries")
        if len(self.tokens) != len(self.frequencies):
            raise ValueError("tokens and frequencies lengths differ")
        self._index = {token: i for i, token in enumerate(self.tokens)}
        if len(self._index) != len(self.tokens):
            raise ValueError("Vocabulary tokens must be unique")
        return self

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def id_of(self, token: str) -> int:
        """Id of a token, or UNK for unknown tokens."""
        return self._index.get(token, UNK_ID)

    def token_of(self, token_id: int) -> str:
        """Token string of an id.

        Raises:
            IndexError: If the id is out of range.
        """
        if not 0 <= token_id < len(self.tokens):
            raise IndexError(f"Token id {token_id} out of range [0, {len(self.tokens)})")
        return self.tokens[token_id]

    def is_descriptor_token(self, token_id: int) -> bool:
        """True for corpus tokens made of letters only (never PAD/UNK)."""
        return token_id >= 2 and is_alphabetic(self.tokens[token_id])

    @property
    def corpus_size(self) -> int:
        """Number of corpus tokens (excluding PAD and UNK)."""
        return len(self.tokens) - 2


def build_vocabulary(docs: Iterable[RawDocument], min_count: int = 1) -> Vocabulary:
    """Build the vocabulary of a corpus.

    Args:
        docs: The documents to count tokens over.
        min_count: Minimum corpus frequency for a token to be retained.

    Returns:
        A vocabulary with ids assigned by descending frequency, ties broken
        lexicographically.

    Raises:
        ValueError: If ``min_count < 1`` or no token survives the cutoff.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")

    counts: Counter[str] = Counter()
    for doc in docs:
        counts.update(t.text for t in tokenize(doc.text))

    retained = sorted(
        ((token, n) for token, n in counts.items() if n >= min_count),
        key=lambda item: (-item[1], item[0]),
    )
    if not retained:
        raise ValueError(
            f"No token reaches min_count={min_count}; lower the cutoff or check the corpus"
        )

    logger.info(
        f"Vocabulary: kept {len(retained)} of {len(counts)} distinct tokens (min_count={min_count})"
    )
    return Vocabulary(
        tokens=[PAD_TOKEN, UNK_TOKEN] + [token for token, _ in retained],
        frequencies=[0, 0] + [n for _, n in retained],
        min_count=min_count,
    )


def encode(doc: RawDocument, vocab: Vocabulary, max_len: int) -> TokenSequence:
    """Encode a document to a fixed-length id sequence.

    Tokens beyond ``max_len`` are truncated, unknown tokens map to UNK, and short
    documents are padded with PAD under a false mask.

    Raises:
        ValueError: If ``max_len < 1`` or the document has no tokens.
    """
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    ids = [vocab.id_of(t.text) for t in tokenize(doc.text)[:max_len]]
    if not ids:
        raise ValueError(f"Document {doc.id!r} has no tokens; cannot attend over it")
    n = len(ids)
    pad = max_len - n
    return TokenSequence(ids=ids + [PAD_ID] * pad, mask=[True] * n + [False] * pad)
