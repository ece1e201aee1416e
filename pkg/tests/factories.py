"""Builders for small parameter sets, sequences and corpora used across the tests."""

import json
from pathlib import Path

import numpy as np

from batm.corpus.vocabulary import PAD_TOKEN, UNK_TOKEN, Vocabulary
from batm.embedding import EmbeddingMatrix
from batm.model.params import ModelParams, init_params
from batm.models import PAD_ID, LabeledExample, LabeledSplit, TokenSequence


def make_sequence(valid_ids: list[int], max_len: int | None = None) -> TokenSequence:
    max_len = max_len or len(valid_ids)
    pad = max_len - len(valid_ids)
    return TokenSequence(ids=list(valid_ids) + [PAD_ID] * pad, mask=[True] * len(valid_ids) + [False] * pad)


def random_sequence(rng: np.random.Generator, vocab_size: int, max_len: int) -> TokenSequence:
    n = int(rng.integers(1, max_len + 1))
    return make_sequence([int(i) for i in rng.integers(1, vocab_size, size=n)], max_len)


def make_params(
    rng: np.random.Generator,
    V: int = 8,
    E: int = 3,
    K: int = 2,
    Dk: int = 2,
    Dh: int = 2,
    C: int = 2,
    dtype=np.float64,
    emb_std: float = 1.0,
    bias_std: float = 0.5,
) -> ModelParams:
    """Random parameters with non-zero biases and a zero PAD row."""
    matrix = rng.normal(0.0, emb_std, size=(V, E))
    matrix[PAD_ID] = 0
    params = init_params(
        EmbeddingMatrix(matrix=matrix.astype(dtype)),
        num_classes=C,
        num_heads=K,
        head_dim=Dk,
        pool_dim=Dh,
        seed=int(rng.integers(0, 2**31)),
    )
    params.head_b[...] = rng.normal(0.0, bias_std, size=params.head_b.shape)
    params.pool_b[...] = rng.normal(0.0, bias_std, size=params.pool_b.shape)
    params.cls_b[...] = rng.normal(0.0, bias_std, size=params.cls_b.shape)
    return params


def zero_attention(params: ModelParams) -> ModelParams:
    """Copy of ``params`` with every non-embedding tensor set to zero."""
    out = params.copy()
    for name, tensor in out.items():
        if name != "embedding":
            tensor[...] = 0
    return out


def make_vocab(tokens: list[str]) -> Vocabulary:
    return Vocabulary(tokens=[PAD_TOKEN, UNK_TOKEN, *tokens], frequencies=[0, 0] + [1] * len(tokens))


def make_split(sequences: list[TokenSequence], class_ids: list[int], labels: list[str]) -> LabeledSplit:
    examples = [
        LabeledExample(doc_id=f"d{i}", sequence=s, class_id=c)
        for i, (s, c) in enumerate(zip(sequences, class_ids))
    ]
    return LabeledSplit(train=examples, validation=examples, test=[], labels=labels)


FILLERS = [f"w{chr(97 + i // 26)}{chr(97 + i % 26)}" for i in range(40)]
INDICATORS = {"sports": "apple", "politics": "zebra"}


def synthetic_records(n: int = 200, seed: int = 0) -> list[dict]:
    """Two-class corpus; each document carries its class indicator twice plus 8 fillers."""
    rng = np.random.default_rng(seed)
    records = []
    labels = sorted(INDICATORS)
    for i in range(n):
        label = labels[i % 2]
        words = [INDICATORS[label]] * 2 + [FILLERS[j] for j in rng.integers(0, len(FILLERS), size=8)]
        rng.shuffle(words)
        records.append({"id": f"doc-{i}", "headline": " ".join(words), "category": label})
    return records


def write_jsonl(path: Path, records: list[dict]) -> Path:
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    return path
