"""Canonical tokenizer.

Text is lowercased and split on whitespace and punctuation boundaries.
Punctuation itself is a boundary and never becomes a token; letters and digits
do. Every token carries an ``alphabetic`` flag: classification uses all tokens,
topic descriptors keep only the alphabetic ones.
"""

import re
from typing import NamedTuple

__all__ = ["Token", "tokenize", "token_texts", "is_alphabetic"]

# runs of letters/digits; "_" counts as punctuation
_TOKEN_RE = re.compile(r"[^\W_]+")


class Token(NamedTuple):
    """A single token and whether it consists of letters only."""

    text: str
    alphabetic: bool


def is_alphabetic(token: str) -> bool:
    """True iff the token is made of letters only (no digits)."""
    return token.isalpha()


def tokenize(text: str) -> list[Token]:
    """Tokenize a text.

    Args:
        text: Raw document text.

    Returns:
        Lowercased tokens in order, each flagged alphabetic or not. Empty text
        yields an empty list.

    Example:
        >>> [t.text for t in tokenize("The U.S. won 3-0!")]
        ['the', 'u', 's', 'won', '3', '0']
    """
    return [Token(m, is_alphabetic(m)) for m in _TOKEN_RE.findall(text.lower())]


def token_texts(text: str) -> list[str]:
    """Shorthand for the token strings of :func:`tokenize`."""
    return [t.text for t in tokenize(text)]
