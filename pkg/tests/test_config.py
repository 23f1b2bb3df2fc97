import logging

import pytest
import yaml

from config import Config
from exceptions import ConfigError


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    monkeypatch.delenv("TAELMAN_CONFIG", raising=False)
    monkeypatch.delenv("RESOURCE_BUDGET_SECS", raising=False)


def write_config(tmp_path, data):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return str(path)


def test_missing_file_creates_defaults(tmp_path):
    path = tmp_path / "fresh.yaml"
    config = Config(str(path))
    assert config.config == Config.DEFAULT_CONFIG
    assert yaml.safe_load(path.read_text(encoding="utf-8")) == Config.DEFAULT_CONFIG
    assert config.validate()


def test_yaml_overrides_defaults(tmp_path):
    config = Config(write_config(tmp_path, {"nmax": 4, "output_format": "csv"}))
    assert config["nmax"] == 4
    assert config.get("output_format") == "csv"
    assert config["max_window_dim"] == Config.DEFAULT_CONFIG["max_window_dim"]
    assert config.get("missing", "fallback") == "fallback"


def test_unknown_keys_are_ignored_with_a_warning(tmp_path, caplog):
    with caplog.at_level(logging.WARNING, logger="config"):
        config = Config(write_config(tmp_path, {"nmax": 1, "translation_model": "x"}))
    assert "translation_model" not in config.config
    assert "translation_model" in caplog.text


def test_config_path_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("TAELMAN_CONFIG", write_config(tmp_path, {"seed": 11}))
    assert Config()["seed"] == 11


def test_resource_budget_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("RESOURCE_BUDGET_SECS", "30")
    assert Config(write_config(tmp_path, {}))["time_budget_secs"] == 30
    monkeypatch.setenv("RESOURCE_BUDGET_SECS", "soon")
    with pytest.raises(ConfigError):
        Config(write_config(tmp_path, {}))


@pytest.mark.parametrize("override", [
    {"max_window_dim": 0},
    {"max_workers": True},
    {"nmax": -1},
    {"prime_degree_bound": "3"},
    {"time_budget_secs": 0},
    {"unit_horizon": 2.5},
    {"output_format": "xml"},
])
def test_validation_rejects(tmp_path, override):
    config = Config(write_config(tmp_path, override))
    with pytest.raises(ConfigError):
        config.validate()


def test_malformed_files(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("nmax: [1, 2", encoding="utf-8")
    with pytest.raises(ConfigError):
        Config(str(bad))
    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        Config(str(listing))


def test_empty_file_means_defaults(tmp_path):
    empty = tmp_path / "empty.yaml"
    empty.write_text("", encoding="utf-8")
    assert Config(str(empty)).config == Config.DEFAULT_CONFIG
