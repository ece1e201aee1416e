import json
from pathlib import Path

import pytest

from batm.config import ConfigError, ExperimentConfig, parse_config, valid_keys


class TestPresets:
    def test_news26_defaults(self):
        config = parse_config()
        assert config.preset == "news26"
        assert config.num_heads == 30
        assert config.max_len == 100
        assert config.text_fields == ["headline", "short_description"]

    def test_mind15(self):
        config = parse_config(overrides=["preset=mind15"])
        assert config.num_heads == 180
        assert config.max_len == 512
        assert config.text_fields == ["title", "abstract", "body"]

    def test_explicit_value_beats_preset(self):
        config = parse_config(overrides=["preset=mind15", "num_heads=50"])
        assert config.num_heads == 50


class TestOverrides:
    def test_lambda(self):
        config = parse_config(overrides=["lambda=0.001"])
        assert config.lambda_ == 0.001
        assert config.echo()["lambda"] == 0.001

    def test_json_and_string_values(self):
        config = parse_config(
            overrides=["lambda_list=[0, 0.01]", "data_path=/tmp/corpus.jsonl", "trainable_embeddings=false"]
        )
        assert config.lambda_list == [0.0, 0.01]
        assert config.data_path == Path("/tmp/corpus.jsonl")
        assert config.trainable_embeddings is False

    def test_typo_suggests_key(self):
        """拼错的键名会提示最接近的合法键。"""
        with pytest.raises(ConfigError, match="Did you mean 'lambda'"):
            parse_config(overrides=["lamda=0.1"])

    def test_malformed_override(self):
        with pytest.raises(ConfigError, match="key=value"):
            parse_config(overrides=["lambda"])

    def test_invalid_value(self):
        with pytest.raises(ConfigError, match="Invalid configuration"):
            parse_config(overrides=["num_heads=zero"])

    def test_negative_lambda(self):
        with pytest.raises(ConfigError):
            parse_config(overrides=["lambda=-1"])


class TestConfigFile:
    def test_override_beats_file(self, tmp_path: Path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"lambda": 0.01, "num_heads": 5}), encoding="utf-8")
        config = parse_config(path, ["lambda=0.1"])
        assert config.lambda_ == 0.1
        assert config.num_heads == 5

    def test_unknown_key_in_file(self, tmp_path: Path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"num_head": 5}), encoding="utf-8")
        with pytest.raises(ConfigError, match="num_heads"):
            parse_config(path)

    def test_not_an_object(self, tmp_path: Path):
        path = tmp_path / "config.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError, match="JSON object"):
            parse_config(path)

    def test_missing_file(self, tmp_path: Path):
        with pytest.raises(FileNotFoundError):
            parse_config(tmp_path / "absent.json")

    def test_echo_round_trips(self, tmp_path: Path):
        config = parse_config(overrides=["lambda=0.001", "num_heads=7", "preset=custom"])
        path = tmp_path / "effective.json"
        path.write_text(json.dumps(config.echo()), encoding="utf-8")
        assert parse_config(path) == config


def test_valid_keys_use_documented_names():
    keys = valid_keys()
    assert "lambda" in keys
    assert "lambda_" not in keys
    assert len(keys) == len(ExperimentConfig.model_fields)


def test_train_config_paths(tmp_path: Path):
    train_config = parse_config(overrides=["seed=9"]).train_config(tmp_path)
    assert train_config.checkpoint_path == tmp_path / "checkpoint.bin"
    assert train_config.log_path == tmp_path / "epoch_log.jsonl"
    assert train_config.seed == 9


def test_public_names():
    """模块只导出配置相关的名字，且每个名字都已定义。"""
    import batm.config as config_module

    assert sorted(config_module.__all__) == sorted(
        [
            "ConfigError",
            "PRESETS",
            "DEFAULT_SEEDS",
            "ExperimentConfig",
            "TrainConfig",
            "RunConfig",
            "valid_keys",
            "parse_config",
        ]
    )
    assert all(hasattr(config_module, name) for name in config_module.__all__)
