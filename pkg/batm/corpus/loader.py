"""Corpus file readers.

The corpus is a JSON-lines file, one record per line. Text fields are
concatenated in the configured order; the category field goes through an
optional alias map that merges duplicated categories.
"""

import json
from pathlib import Path
from typing import Sequence

from ..models import RawDocument
from ..utils.logger import logger

__all__ = ["load_jsonl", "load_alias_map"]


def load_alias_map(path: Path) -> dict[str, str]:
    """Load a category alias map from a two-column TSV file.

    Each non-empty line is ``old_label<TAB>new_label``. Lines starting with ``#``
    are comments.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If a line does not have exactly two non-empty columns.
    """
    if not path.is_file():
        raise FileNotFoundError(f"Alias map file does not exist: {path}")

    aliases: dict[str, str] = {}
    with path.open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n\r")
            if not line.strip() or line.startswith("#"):
                continue
            columns = line.split("\t")
            if len(columns) != 2 or not columns[0].strip() or not columns[1].strip():
                raise ValueError(
                    f"{path}:{lineno}: expected 'old_label<TAB>new_label', got {line!r}"
                )
            aliases[columns[0].strip()] = columns[1].strip()
    logger.debug(f"Loaded {len(aliases)} category aliases from {path}")
    return aliases


def _resolve_alias(label: str, aliases: dict[str, str]) -> str:
    seen = {label}
    while label in aliases:
        label = aliases[label]
        if label in seen:
            raise ValueError(f"Alias map contains a cycle through {label!r}")
        seen.add(label)
    return label


def load_jsonl(
    path: Path,
    text_fields: Sequence[str] = ("headline", "short_description"),
    label_field: str = "category",
    id_field: str | None = "id",
    aliases: dict[str, str] | None = None,
    separator: str = " ",
) -> list[RawDocument]:
    """Read labeled documents from a JSON-lines corpus file.

    Args:
        path: The corpus file.
        text_fields: Fields concatenated (in this order) into the document text.
            Missing or null fields are treated as empty.
        label_field: Field holding the category name.
        id_field: Field holding the document id. Records without it are identified
            by their line number (``"line-<n>"``).
        aliases: Optional category alias map applied to every label.
        separator: String placed between concatenated text fields.

    Returns:
        One document per valid line, in file order.

    Raises:
        FileNotFoundError: If the file does not exist.
        RuntimeError: If the file cannot be read.
        ValueError: If no valid record is found.
    """
    if not path.exists():
        raise FileNotFoundError(f"Corpus file does not exist: {path}")
    if not path.is_file():
        raise ValueError(f"Corpus path is not a regular file: {path}")

    aliases = aliases or {}
    documents: list[RawDocument] = []
    seen_ids: set[str] = set()
    skipped = 0

    try:
        f = path.open("rb")
    except OSError as e:
        raise RuntimeError(f"Cannot read corpus file {path}: {e}")

    with f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line.decode("utf-8"))
                if not isinstance(record, dict):
                    raise ValueError("record is not a JSON object")
                label = record.get(label_field)
                if not isinstance(label, str) or not label.strip():
                    raise ValueError(f"missing or empty {label_field!r}")
                parts = [record.get(name) for name in text_fields]
                if any(p is not None and not isinstance(p, str) for p in parts):
                    raise ValueError("text field is not a string")
                text = separator.join(p for p in parts if p)
                doc_id = record.get(id_field) if id_field else None
                doc_id = str(doc_id) if doc_id is not None else f"line-{lineno}"
                if doc_id in seen_ids:
                    raise ValueError(f"duplicate id {doc_id!r}")
                document = RawDocument(
                    id=doc_id, text=text, label=_resolve_alias(label.strip(), aliases)
                )
            except ValueError as e:  # JSONDecodeError and UnicodeDecodeError are ValueErrors
                skipped += 1
                logger.warning(f"{path}:{lineno}: skipping malformed record ({e})")
                continue
            seen_ids.add(doc_id)
            documents.append(document)

    if skipped:
        logger.warning(f"Skipped {skipped} malformed line(s) in {path}")
    if not documents:
        raise ValueError(f"No valid records found in corpus file {path}")

    logger.info(
        f"Loaded {len(documents)} documents with {len({d.label for d in documents})} labels from {path}"
    )
    return documents
