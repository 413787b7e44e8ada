"""Smoke tests for the command-line tool and the Python module."""

import math
import os
import subprocess
import sys
from pathlib import Path

import pytest

CLI = os.environ.get("NPBE_CLI")
CONFIGS = Path(os.environ.get("NPBE_CONFIG_DIR", Path(__file__).resolve().parents[2] / "configs"))
if os.environ.get("NPBE_PYTHON_DIR"):
    sys.path.insert(0, os.environ["NPBE_PYTHON_DIR"])

needs_cli = pytest.mark.skipif(not CLI, reason="NPBE_CLI not set")


def run(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True, check=False)


@needs_cli
def test_gridinfo_counts_nodes():
    r = run("gridinfo", "--config", str(CONFIGS / "cube.cfg"))
    assert r.returncode == 0
    assert "nodes = 729" in r.stdout


@needs_cli
def test_linear_solve_takes_one_iteration(tmp_path):
    r = run("solve", "--config", str(CONFIGS / "linear.cfg"), "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    assert "converged after 1 Picard iteration" in r.stdout
    lines = (tmp_path / "solution.csv").read_text().splitlines()
    assert lines[0].startswith("#")


@needs_cli
def test_bound_table_and_usage_error(tmp_path):
    r = run("bound", "--config", str(CONFIGS / "bound.cfg"), "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    assert run("frobnicate").returncode == 2


def test_python_module():
    npbelab = pytest.importorskip("npbelab")
    nodes, weights = npbelab.sparse_grid(2, 2)
    assert len(nodes) == 13
    assert math.isclose(sum(weights), 1.0, abs_tol=1e-13)

    r = npbelab.solve_constant(1, 0.0, 1.0, 33, kappa_sq=0.0, source=2.0)
    # -u'' = 2 with zero ends: u = x (1 - x), exact on the grid.
    assert r["converged"] and r["iterations"] == 1
    assert max(abs(u - x * (1 - x)) for u, x in zip(r["u"], [k / 32 for k in range(33)])) < 1e-10

    assert npbelab.predict_error(2, 1.0, 1.0, 3, 13.0)[0] == "subexponential"
    assert npbelab.shoot(-0.05) is None
    assert npbelab.shoot(0.5)["sup_norm"] > 0.0
    with pytest.raises(ValueError):
        npbelab.sparse_grid(0, 1)
