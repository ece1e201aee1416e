import json
from pathlib import Path

import pandas as pd
import pytest

from batm.__main__ import EXIT_ERROR, EXIT_OK, build_parser, dispatch, main, parse_args
from batm.config import DEFAULT_SEEDS
from batm.experiments import LAMBDA_SWEEP_COLUMNS
from batm.utils.custom_json import load_jsonl_records
from tests.factories import synthetic_records, write_jsonl


@pytest.fixture
def corpus_path(tmp_path: Path) -> Path:
    return write_jsonl(tmp_path / "corpus.jsonl", synthetic_records(40))


@pytest.fixture
def small_args(corpus_path: Path) -> list[str]:
    """一个很小的模型配置，保证命令在几秒内完成。"""
    settings = {
        "data_path": str(corpus_path),
        "max_len": 12,
        "num_heads": 2,
        "embedding_dim": 8,
        "head_dim": 4,
        "pool_dim": 4,
        "batch_size": 8,
        "epochs": 2,
        "base_lr": 0.01,
        "precision": "float64",
        "top_t": 5,
    }
    args = []
    for key, value in settings.items():
        args += ["--set", f"{key}={value}"]
    return args + ["--threads", "1"]


def run(command: str, out: Path, *args: str) -> int:
    return dispatch(parse_args([command, "--out", str(out), *args]))


class TestParser:
    def test_every_command_accepts_common_options(self):
        parser = build_parser()
        for command in ("prepare", "train", "eval", "topics", "coherence", "entropy-report", "gradcheck"):
            args = parser.parse_args([command, "--set", "lambda=0.1", "--threads", "2"])
            assert args.command == command
            assert args.overrides == ["lambda=0.1"]

    def test_seeds(self):
        assert parse_args(["train", "--seeds"]).seeds == DEFAULT_SEEDS
        assert parse_args(["train", "--seeds", "3,4"]).seeds == [3, 4]
        assert parse_args(["train"]).seeds is None

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            parse_args(["fit"])


class TestGradcheck:
    def test_passes(self, tmp_path: Path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["gradcheck", "--out", str(tmp_path)])
        assert exc.value.code == EXIT_OK
        summary = json.loads((tmp_path / "gradcheck.json").read_text(encoding="utf-8"))
        assert summary["passed"] is True
        assert len(summary["runs"]) == 40
        assert "max relative error" in capsys.readouterr().out


class TestErrors:
    def test_unknown_key(self, tmp_path: Path):
        status = run("train", tmp_path, "--set", "lamda=0.1")
        assert status == EXIT_ERROR
        error = json.loads((tmp_path / "error.json").read_text(encoding="utf-8"))
        assert error["command"] == "train"
        assert error["error_type"] == "ConfigError"
        assert "lambda" in error["message"]

    def test_missing_checkpoint(self, tmp_path: Path, small_args):
        status = run("eval", tmp_path, *small_args)
        assert status == EXIT_ERROR
        error = json.loads((tmp_path / "error.json").read_text(encoding="utf-8"))
        assert error["error_type"] == "FileNotFoundError"


class TestPipeline:
    def test_prepare(self, tmp_path: Path, small_args):
        assert run("prepare", tmp_path, *small_args) == EXIT_OK
        manifest = load_jsonl_records(tmp_path / "splits.jsonl")
        assert len(manifest) == 40
        assert {r["split"] for r in manifest} == {"train", "validation", "test"}
        label_map = json.loads((tmp_path / "label_map.json").read_text(encoding="utf-8"))
        assert label_map == {"politics": 0, "sports": 1}
        vocab = json.loads((tmp_path / "vocabulary.json").read_text(encoding="utf-8"))
        assert vocab["tokens"][:2] == ["<pad>", "<unk>"]

    def test_train_then_analyse(self, tmp_path: Path, small_args):
        """训练、评估、主题、一致性与熵报告依次运行，结果相互一致。"""
        assert run("train", tmp_path, *small_args) == EXIT_OK
        assert (tmp_path / "checkpoint.bin").is_file()
        assert len(load_jsonl_records(tmp_path / "epoch_log.jsonl")) == 2
        metrics = json.loads((tmp_path / "metrics.json").read_text(encoding="utf-8"))

        assert run("eval", tmp_path, *small_args) == EXIT_OK
        report = json.loads((tmp_path / "eval.json").read_text(encoding="utf-8"))
        assert report["labels"] == ["politics", "sports"]
        assert report["test"]["accuracy"] == metrics["test"]["accuracy"]
        assert report["validation"]["accuracy"] == metrics["validation"]["accuracy"]

        assert run("topics", tmp_path, *small_args, "--set", "export_matrices=true") == EXIT_OK
        descriptors = load_jsonl_records(tmp_path / "descriptors.jsonl")
        assert [d["head"] for d in descriptors] == [0, 1]
        assert all(len(d["terms"]) <= 5 for d in descriptors)
        matrices = pd.read_csv(tmp_path / "topic_matrices.csv")
        assert list(matrices.columns) == ["head", "doc_id", "token_id", "weight"]
        assert matrices.groupby(["head", "doc_id"])["weight"].sum().round(9).eq(1).all()

        assert run("coherence", tmp_path, *small_args) == EXIT_OK
        coherence = json.loads((tmp_path / "coherence.json").read_text(encoding="utf-8"))
        assert len(coherence["topics"]) == 2
        assert "average C_v" in (tmp_path / "coherence.txt").read_text(encoding="utf-8")

        assert run("entropy-report", tmp_path, *small_args) == EXIT_OK
        entropy = json.loads((tmp_path / "entropy_report.json").read_text(encoding="utf-8"))
        assert entropy["num_documents"] == 40
        assert entropy["num_heads"] == 2

    def test_effective_config_reproduces_run(self, tmp_path: Path, small_args):
        first, second = tmp_path / "first", tmp_path / "second"
        assert run("train", first, *small_args, "--seed", "4") == EXIT_OK
        effective = first / "effective_config.json"
        assert json.loads(effective.read_text(encoding="utf-8"))["seed"] == 4

        assert run("train", second, "--config", str(effective), "--threads", "2") == EXIT_OK
        assert (first / "checkpoint.bin").read_bytes() == (second / "checkpoint.bin").read_bytes()
        assert (first / "epoch_log.jsonl").read_bytes() == (second / "epoch_log.jsonl").read_bytes()

    def test_multi_seed(self, tmp_path: Path, small_args):
        assert run("train", tmp_path, *small_args, "--seeds", "1,2", "--set", "epochs=1") == EXIT_OK
        summary = json.loads((tmp_path / "seed_summary.json").read_text(encoding="utf-8"))
        assert summary["seeds"] == [1, 2]
        assert [r["seed"] for r in summary["runs"]] == [1, 2]
        assert set(summary["metrics"]) == {
            "validation_accuracy",
            "validation_macro_f1",
            "test_accuracy",
            "test_macro_f1",
        }
        assert (tmp_path / "seed_1" / "checkpoint.bin").is_file()

    def test_lambda_sweep(self, tmp_path: Path, small_args):
        status = run("lambda-sweep", tmp_path, *small_args, "--set", "lambda_list=[0, 0.001]", "--set", "epochs=1")
        assert status == EXIT_OK
        frame = pd.read_csv(tmp_path / "lambda_sweep.csv")
        assert list(frame.columns) == LAMBDA_SWEEP_COLUMNS
        assert frame["lambda"].tolist() == [0.0, 0.001]
        assert (tmp_path / "lambda_0.001" / "metrics.json").is_file()

    def test_head_sweep(self, tmp_path: Path, small_args):
        status = run("head-sweep", tmp_path, *small_args, "--set", "head_list=[1, 3]", "--set", "epochs=1")
        assert status == EXIT_OK
        frame = pd.read_csv(tmp_path / "head_sweep.csv")
        assert frame["num_heads"].tolist() == [1, 3]
