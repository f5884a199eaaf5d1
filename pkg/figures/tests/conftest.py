import subprocess
import sys

import pytest

PRESET_KINDS = {
    "fig5": "vs-variance", "fig6": "vs-linewidth", "fig7": "vs-distance",
    "fig8a": "vs-variance", "fig8b": "vs-variance", "fig9": "vs-linewidth",
    "fig10": "vs-distance", "fig11a": "vs-variance", "fig11b": "vs-variance",
    "fig12": "vs-linewidth", "fig13": "vs-distance", "fig14a": "comparison",
    "fig14b": "comparison", "fig14c": "comparison", "fig15": "comparison",
    "fig16": "vs-distance",
}


def run_cprlab(args, out_path):
    """Drive the primary package strictly through its command-line interface."""
    cmd = [sys.executable, "-m", "cprlab.cli"] + args + ["--out", str(out_path)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return out_path


@pytest.fixture(scope="session")
def preset_csvs(tmp_path_factory):
    root = tmp_path_factory.mktemp("preset_csvs")
    paths = {}
    for name in PRESET_KINDS:
        paths[name] = run_cprlab(["floor", "--preset", name], root / f"{name}.csv")
    return paths
