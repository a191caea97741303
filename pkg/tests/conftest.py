import json
import math
from pathlib import Path

import pytest

from revival.cli import main

GOLDEN = Path(__file__).parent / "golden"


def box_config(**sections) -> dict:
    """Box ladder at exact N = 1 resonance (r rounded to 10), hbar_eff = 0.01."""
    cfg = {
        "spectrum": {"kind": "box", "hbar_eff": 0.01},
        "coupling": {"mode": "constant", "V": 1.0},
        "resonance": {"N": 1, "lambda": 0.05},
        "packet": {"center": 10, "delta_n": 2},
        "evolution": {"dt": 2 * math.pi / 100, "t_max": 20.0},
    }
    for name, values in sections.items():
        cfg.setdefault(name, {}).update(values)
    return cfg


@pytest.fixture
def write_config(tmp_path):
    def _write(data: dict, name: str = "config.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def cli(capsys):
    """Run the CLI in-process; returns ``(exit code, stdout, stderr)``."""

    def _run(*argv):
        code = main([str(a) for a in argv])
        out = capsys.readouterr()
        return code, out.out, out.err

    return _run


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
