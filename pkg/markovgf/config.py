"""Runtime settings read from the environment."""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import ConfigError


def _env_int(name: str, default: int, minimum: int = 0) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw.strip().replace("_", ""))
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class Settings:
    """Knobs shared by the library and the CLI."""
    t_max: int = 16
    max_steps: int = 1_000_000
    k_max: int = 4
    series_len: int = 20
    samples: int = 101
    seed: int = 20240101
    n_paths: int = 100_000
    cofactor_max_dim: int = 6
    log_level: str = "INFO"
    log_dir: Optional[Path] = None


def get_settings() -> Settings:
    """Build Settings from MARKOVGF_* variables (and LOG_DIR)."""
    log_dir = os.environ.get("LOG_DIR")
    level = os.environ.get("MARKOVGF_LOG_LEVEL", "INFO").upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise ConfigError(f"MARKOVGF_LOG_LEVEL is not a logging level: {level!r}")
    return Settings(
        t_max=_env_int("MARKOVGF_T_MAX", 16),
        max_steps=_env_int("MARKOVGF_MAX_STEPS", 1_000_000, minimum=1),
        k_max=_env_int("MARKOVGF_KMAX", 4),
        series_len=_env_int("MARKOVGF_SERIES_LEN", 20, minimum=1),
        samples=_env_int("MARKOVGF_SAMPLES", 101, minimum=2),
        seed=_env_int("MARKOVGF_SEED", 20240101),
        n_paths=_env_int("MARKOVGF_PATHS", 100_000, minimum=1),
        cofactor_max_dim=_env_int("MARKOVGF_COFACTOR_MAX_DIM", 6),
        log_level=level,
        log_dir=Path(log_dir).expanduser() if log_dir else None,
    )
