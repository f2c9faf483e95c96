"""Tests for the layered run configuration."""

from __future__ import annotations

import pytest

from poincare_relations.config import RunConfig, load_run_config
from poincare_relations.const import (
    DEFAULT_PRECISION_BITS,
    DEFAULT_TARGET_ERROR,
    ENV_PRECISION,
    ENV_THREADS,
    OUTPUT_JSON,
    OUTPUT_PRETTY,
)
from poincare_relations.errors import ConfigurationError

MOCK_YAML = """
precision_bits: 192
threads: 2
output_format: JSON
logger:
  default: warning
  logs:
    poincare_relations.poincare: debug
"""


@pytest.fixture
def config_file(tmp_path):
    """Return a YAML configuration file."""
    path = tmp_path / "run.yaml"
    path.write_text(MOCK_YAML, encoding="utf-8")
    return path


def test_defaults():
    """Test the built-in defaults."""
    config = load_run_config(env={})
    assert config == RunConfig()
    assert config.precision_bits == DEFAULT_PRECISION_BITS
    assert config.target_error == DEFAULT_TARGET_ERROR
    assert config.output_format == OUTPUT_PRETTY
    assert config.log_level == "info"


def test_yaml_layer(config_file):
    """Test values and the logger block read from YAML."""
    config = load_run_config(config_file, env={})
    assert config.precision_bits == 192
    assert config.threads == 2
    assert config.output_format == OUTPUT_JSON
    assert config.log_level == "warning"
    assert config.log_levels == {"poincare_relations.poincare": "debug"}


def test_environment_beats_yaml(config_file):
    """Test that environment variables override the file."""
    env = {ENV_PRECISION: "256", ENV_THREADS: "3"}
    config = load_run_config(config_file, env=env)
    assert config.precision_bits == 256
    assert config.threads == 3


def test_overrides_beat_environment(config_file):
    """Test that CLI overrides win and None entries are ignored."""
    config = load_run_config(
        config_file,
        env={ENV_PRECISION: "256"},
        overrides={"precision_bits": 320, "threads": None, "target_error": 1e-12},
    )
    assert config.precision_bits == 320
    assert config.threads == 2
    assert config.target_error == 1e-12


def test_os_environ_used_by_default(monkeypatch):
    """Test that os.environ is read when no mapping is passed."""
    monkeypatch.setenv(ENV_THREADS, "5")
    assert load_run_config().threads == 5


@pytest.mark.parametrize(
    "data",
    [
        {"precision_bits": 32},
        {"target_error": 0},
        {"threads": 0},
        {"output_format": "xml"},
        {"logger": {"default": "loud"}},
        {"unknown": 1},
    ],
)
def test_invalid_values(data):
    """Test schema violations."""
    with pytest.raises(ConfigurationError):
        RunConfig.from_mapping(data)


def test_invalid_files(tmp_path):
    """Test missing, malformed and non-mapping files."""
    with pytest.raises(ConfigurationError):
        load_run_config(tmp_path / "missing.yaml", env={})
    broken = tmp_path / "broken.yaml"
    broken.write_text("precision_bits: [", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_run_config(broken, env={})
    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_run_config(listing, env={})


def test_with_overrides_revalidates():
    """Test that with_overrides applies the schema again."""
    config = RunConfig()
    assert config.with_overrides() is config
    assert config.with_overrides(threads=4).threads == 4
    with pytest.raises(ConfigurationError):
        config.with_overrides(precision_bits=8)
    with pytest.raises(ConfigurationError):
        config.with_overrides(cutoff=100)


@pytest.mark.parametrize("overrides", [{"threads": 0}, {"precision": 256}])
def test_invalid_overrides(overrides):
    """Test that CLI overrides pass through the same validation."""
    with pytest.raises(ConfigurationError):
        load_run_config(env={}, overrides=overrides)


def test_as_mapping_round_trip():
    """Test that as_mapping is accepted by from_mapping."""
    config = RunConfig(precision_bits=200, log_levels={"poincare_relations": "debug"})
    assert RunConfig.from_mapping(config.as_mapping()) == config
