"""Pytest configuration and fixtures for markovgf tests."""
from fractions import Fraction as F
from pathlib import Path
import pytest

from markovgf.chain import make_chain, random_chain

PROJECT_ROOT = Path(__file__).parent.parent
CHAINS_DIR = PROJECT_ROOT / "data" / "chains"
GOLDEN_DIR = Path(__file__).parent / "golden"

TWELFTHS_MATRIX = [
    [F(5, 12), F(2, 12), F(4, 12), F(1, 12)],
    [F(1, 12), F(3, 12), F(3, 12), F(5, 12)],
    [F(1, 12), F(6, 12), F(4, 12), F(1, 12)],
    [F(2, 12), F(1, 12), F(6, 12), F(3, 12)],
]


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Run every test with default settings."""
    for name in (
        "MARKOVGF_T_MAX", "MARKOVGF_MAX_STEPS", "MARKOVGF_KMAX", "MARKOVGF_SERIES_LEN",
        "MARKOVGF_SAMPLES", "MARKOVGF_SEED", "MARKOVGF_PATHS", "MARKOVGF_COFACTOR_MAX_DIM",
        "MARKOVGF_LOG_LEVEL", "LOG_DIR",
    ):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def twelfths_chain():
    """The four-state worked example with entries in twelfths."""
    return make_chain(["1", "2", "3", "4"], TWELFTHS_MATRIX)


@pytest.fixture
def swap_chain():
    return make_chain(["1", "2"], [[0, 1], [1, 0]])


@pytest.fixture
def lazy_chain():
    return make_chain(["1", "2"], [[F(3, 4), F(1, 4)], [F(2, 3), F(1, 3)]])


@pytest.fixture(scope="session")
def random_chains():
    """50 seeded irreducible chains with d in 2..7."""
    return [random_chain(2 + seed % 6, seed) for seed in range(50)]


@pytest.fixture
def all_chains(twelfths_chain, swap_chain, lazy_chain, random_chains):
    return [twelfths_chain, swap_chain, lazy_chain] + random_chains


@pytest.fixture
def chain_file(tmp_path):
    """Write a chain document into tmp_path and return its path."""
    def write(text: str, name: str = "chain.json") -> Path:
        path = tmp_path / name
        path.write_text(text)
        return path
    return write
