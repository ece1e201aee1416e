import json
import os
from collections import Counter
from pathlib import Path

import pytest

from batm.config import ExperimentConfig
from batm.corpus.pipeline import prepare_corpus
from batm.experiments import lambda_sweep

NEWS_PATH = os.getenv("BATM_NEWS_PATH")


def news_subset(source: Path, target: Path, categories: int = 5, per_category: int = 400) -> Path:
    """取最常见的几个类别，每类保留前 per_category 篇。"""
    records = [json.loads(line) for line in source.read_text(encoding="utf-8").splitlines() if line.strip()]
    top = [c for c, _ in Counter(r["category"] for r in records).most_common(categories)]
    kept: list[dict] = []
    seen: Counter[str] = Counter()
    for i, record in enumerate(records):
        label = record["category"]
        if label in top and seen[label] < per_category:
            seen[label] += 1
            kept.append({"id": str(i), **record})
    target.write_text("".join(json.dumps(r) + "\n" for r in kept), encoding="utf-8")
    return target


@pytest.mark.slow
@pytest.mark.skipif(NEWS_PATH is None, reason="BATM_NEWS_PATH is not set")
def test_entropy_decreases_with_lambda(tmp_path: Path):
    """熵约束越强，平均文档熵越低；较大的 lambda 会牺牲分类准确率。"""
    data_path = news_subset(Path(NEWS_PATH), tmp_path / "news.jsonl")
    config = ExperimentConfig(
        data_path=data_path,
        num_heads=10,
        embedding_dim=50,
        epochs=3,
        seed=1,
    )
    frame = lambda_sweep(config, prepare_corpus(config), [0.0, 1e-4, 1e-3, 1e-2], tmp_path)

    entropies = frame["avg_E_doc"].tolist()
    assert all(a > b for a, b in zip(entropies, entropies[1:]))
    tail = frame[frame["lambda"] >= 1e-3]["accuracy"].tolist()
    assert all(a >= b for a, b in zip(tail, tail[1:]))
