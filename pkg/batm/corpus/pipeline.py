"""End-to-end corpus preparation: load, build vocabulary, encode, split."""

from dataclasses import dataclass
from pathlib import Path

from ..config import ExperimentConfig
from ..models import LabeledExample, LabeledSplit, RawDocument
from ..utils.custom_json import dump_jsonl
from ..utils.logger import logger
from .loader import load_alias_map, load_jsonl
from .splitter import split
from .tokenizer import token_texts
from .vocabulary import Vocabulary, build_vocabulary, encode

__all__ = ["PreparedCorpus", "encode_corpus", "prepare_corpus", "write_split_manifest"]


@dataclass(slots=True)
class PreparedCorpus:
    """Everything downstream stages need from the corpus."""

    documents: dict[str, RawDocument]
    """Documents by id, including those that were dropped as empty."""
    vocab: Vocabulary
    split: LabeledSplit

    def tokens_of(self, split_name: str) -> list[list[str]]:
        """Full (untruncated) token strings of every document of one split."""
        return [token_texts(self.documents[e.doc_id].text) for e in self.split.part(split_name)]

    def examples_of(self, corpus: str) -> list[LabeledExample]:
        """Examples of one split, or of the whole corpus for ``"all"``."""
        if corpus == "all":
            return [e for _, e in self.split.iter_all()]
        return list(self.split.part(corpus))


def encode_corpus(
    documents: list[RawDocument], vocab: Vocabulary, max_len: int
) -> tuple[list[LabeledExample], list[str]]:
    """Encode documents and assign class ids by sorted label name.

    Documents without tokens cannot be attended over; they are dropped with a warning.

    Returns:
        The encoded examples (in document order) and the label names by class id.
    """
    labels = sorted({d.label for d in documents})
    label_map = {label: i for i, label in enumerate(labels)}
    examples: list[LabeledExample] = []
    dropped = 0
    for doc in documents:
        try:
            sequence = encode(doc, vocab, max_len)
        except ValueError as e:
            dropped += 1
            logger.warning(str(e))
            continue
        examples.append(
            LabeledExample(doc_id=doc.id, sequence=sequence, class_id=label_map[doc.label])
        )
    if dropped:
        logger.warning(f"Dropped {dropped} document(s) without tokens")
    return examples, labels


def prepare_corpus(config: ExperimentConfig) -> PreparedCorpus:
    """Run the corpus stage of the pipeline for a configuration.

    The result depends only on the corpus file and the configuration, so every
    subcommand can re-derive it instead of storing the encoded corpus.

    Raises:
        ValueError: If ``data_path`` is not configured, or the corpus is unusable.
    """
    if config.data_path is None:
        raise ValueError("data_path is not configured")

    aliases = load_alias_map(config.alias_map) if config.alias_map else None
    documents = load_jsonl(
        config.data_path,
        text_fields=config.text_fields,
        label_field=config.label_field,
        id_field=config.id_field,
        aliases=aliases,
    )
    vocab = build_vocabulary(documents, config.min_count)
    examples, labels = encode_corpus(documents, vocab, config.max_len)
    labeled = split(examples, labels, config.split_ratios, config.split_seed)
    return PreparedCorpus(documents={d.id: d for d in documents}, vocab=vocab, split=labeled)


def write_split_manifest(prepared: PreparedCorpus, path: Path) -> int:
    """Write ``{id, split, class_id}`` records, one per line, split by split."""
    count = dump_jsonl(
        (
            {"id": e.doc_id, "split": name, "class_id": e.class_id}
            for name, e in prepared.split.iter_all()
        ),
        path,
    )
    logger.info(f"Wrote split manifest with {count} records to {path}")
    return count
