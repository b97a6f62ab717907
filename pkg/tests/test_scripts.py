"""Tests for the bash helpers in scripts/."""
import os
import subprocess
import sys
from pathlib import Path
import pytest

from conftest import CHAINS_DIR, PROJECT_ROOT

SCRIPT = PROJECT_ROOT / "scripts" / "verify-chains.sh"


def run_script(tmp_path, **overrides):
    env = os.environ.copy()
    env["LOG_DIR"] = str(tmp_path / "logs")
    env["REPORT_DIR"] = str(tmp_path / "reports")
    env["PYTHON"] = sys.executable
    env.update(overrides)
    return subprocess.run(
        [str(SCRIPT)],
        cwd=str(tmp_path),
        env=env,
        capture_output=True,
        text=True,
    )


def test_verify_script_exists():
    """Test that verify-chains.sh exists and is executable."""
    assert SCRIPT.exists()
    assert os.access(SCRIPT, os.X_OK)


def test_verify_script_over_bundled_chains(tmp_path):
    result = run_script(tmp_path)
    assert result.returncode == 0, f"Script failed: {result.stderr}"

    log_file = tmp_path / "logs" / "verify-chains.log"
    assert log_file.exists()
    log_text = log_file.read_text()
    assert "PASS twelfths4.json" in log_text
    assert "PASS swap2.json" in log_text
    assert "REJECTED reducible4.json" in log_text
    assert "Summary: 4 passed, 1 rejected, 0 failed" in log_text

    reports = sorted(p.name for p in (tmp_path / "reports").iterdir())
    assert "twelfths4.json.report.json" in reports
    assert "reducible4.json.report.json" not in reports


def test_verify_script_missing_directory(tmp_path):
    result = run_script(tmp_path, CHAINS_DIR=str(tmp_path / "nowhere"))
    assert result.returncode == 1
    assert "Chains directory not found" in result.stdout


def test_verify_script_empty_directory(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    result = run_script(tmp_path, CHAINS_DIR=str(empty))
    assert result.returncode == 1
    assert "No chain files" in result.stdout


@pytest.mark.skipif(not CHAINS_DIR.exists(), reason="bundled chains missing")
def test_verify_script_logs_timestamps(tmp_path):
    run_script(tmp_path)
    first = (tmp_path / "logs" / "verify-chains.log").read_text().splitlines()[0]
    assert first.startswith("[")
    assert "[INFO] Verifying chains in:" in first
