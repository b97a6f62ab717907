"""Tests for environment-driven settings."""
from pathlib import Path
import pytest

from markovgf.config import Settings, get_settings
from markovgf.errors import ConfigError


def test_defaults():
    settings = get_settings()
    assert settings == Settings()
    assert settings.t_max == 16
    assert settings.max_steps == 1_000_000
    assert settings.log_dir is None


def test_environment_overrides(monkeypatch, tmp_path):
    monkeypatch.setenv("MARKOVGF_T_MAX", "4")
    monkeypatch.setenv("MARKOVGF_PATHS", "1_000")
    monkeypatch.setenv("MARKOVGF_LOG_LEVEL", "debug")
    monkeypatch.setenv("LOG_DIR", str(tmp_path))
    settings = get_settings()
    assert settings.t_max == 4
    assert settings.n_paths == 1000
    assert settings.log_level == "DEBUG"
    assert settings.log_dir == Path(tmp_path)


@pytest.mark.parametrize("name,value", [
    ("MARKOVGF_T_MAX", "-1"),
    ("MARKOVGF_SAMPLES", "1"),
    ("MARKOVGF_SEED", "seed"),
    ("MARKOVGF_LOG_LEVEL", "LOUD"),
])
def test_invalid_values(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigError):
        get_settings()
