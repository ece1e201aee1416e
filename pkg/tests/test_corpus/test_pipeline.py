from pathlib import Path

import pytest

from batm.config import ExperimentConfig
from batm.corpus.pipeline import encode_corpus, prepare_corpus, write_split_manifest
from batm.corpus.vocabulary import build_vocabulary
from batm.models import RawDocument
from batm.utils.custom_json import load_jsonl_records
from tests.factories import synthetic_records, write_jsonl


@pytest.fixture
def corpus_path(tmp_path: Path) -> Path:
    return write_jsonl(tmp_path / "corpus.jsonl", synthetic_records(40))


class TestPrepareCorpus:
    def test_deterministic(self, corpus_path: Path):
        config = ExperimentConfig(data_path=corpus_path, max_len=12)
        a, b = prepare_corpus(config), prepare_corpus(config)
        assert a.split.model_dump_json() == b.split.model_dump_json()
        assert a.vocab.tokens == b.vocab.tokens

    def test_labels_sorted_and_sizes(self, corpus_path: Path):
        prepared = prepare_corpus(ExperimentConfig(data_path=corpus_path, max_len=12))
        assert prepared.split.labels == ["politics", "sports"]
        assert (len(prepared.split.train), len(prepared.split.validation), len(prepared.split.test)) == (32, 4, 4)

    def test_tokens_of_split(self, corpus_path: Path):
        prepared = prepare_corpus(ExperimentConfig(data_path=corpus_path, max_len=3))
        tokens = prepared.tokens_of("train")
        assert len(tokens) == 32
        assert all(len(t) == 10 for t in tokens)

    def test_missing_data_path(self):
        with pytest.raises(ValueError, match="data_path"):
            prepare_corpus(ExperimentConfig())

    def test_split_manifest(self, corpus_path: Path, tmp_path: Path):
        prepared = prepare_corpus(ExperimentConfig(data_path=corpus_path, max_len=12))
        out = tmp_path / "splits.jsonl"
        assert write_split_manifest(prepared, out) == 40
        records = load_jsonl_records(out)
        assert {r["split"] for r in records} == {"train", "validation", "test"}
        assert records[0].keys() == {"id", "split", "class_id"}


class TestEncodeCorpus:
    def test_empty_documents_are_dropped(self):
        documents = [
            RawDocument(id="1", text="hello world", label="b"),
            RawDocument(id="2", text="...", label="a"),
        ]
        vocab = build_vocabulary(documents)
        examples, labels = encode_corpus(documents, vocab, max_len=4)
        assert [e.doc_id for e in examples] == ["1"]
        assert labels == ["a", "b"]
        assert examples[0].class_id == 1
