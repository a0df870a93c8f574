"""Fixture data for the figure tests.

Everything is produced by invoking the asymren CLI as a subprocess — the
figure package consumes only its published CSV/JSON files, so the tests
exercise exactly that interface.
"""

import json
import subprocess
import sys

import pytest


def run_cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "asymren.cli", *argv],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("asymren-data")
    fast = ["--max-level", "6", "--t", "auto:6", "--precision-bits", "320"]
    run_cli("scaling", "--format", "csv", "--max-level", "8", "--t", "auto:8",
            "--precision-bits", "448", "--out", str(d / "scaling.csv"))
    run_cli("scaling", "--format", "json", "--max-level", "8", "--t",
            "auto:8", "--precision-bits", "448",
            "--out", str(d / "scaling.json"))
    run_cli("semiext", "--format", "csv", *fast,
            "--out", str(d / "semiext.csv"))
    run_cli("renorm-limit", "--format", "csv", *fast, "--grid-size", "17",
            "--out", str(d / "renorm.csv"))
    run_cli("bifurcation", "--t-range", "1.3:2.0", "--points", "400",
            "--transient", "32768", "--samples", "64",
            "--out", str(d / "bifurcation.csv"))
    return d


@pytest.fixture(scope="session")
def theta_reference(data_dir):
    """Deepest growth-rate estimate from the scaling JSON report."""
    payload = json.loads((data_dir / "scaling.json").read_text())
    return float(payload["report"]["Theta_est_by_k"][-1][1])
