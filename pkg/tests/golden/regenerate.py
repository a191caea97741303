"""Rewrite the golden files.  Run by hand only after verifying a change is intended.

    python tests/golden/regenerate.py
"""

import json
from pathlib import Path

from revival import report, selfcheck
from revival.cli import main

HERE = Path(__file__).parent

BOX_TIMES_CONFIG = {
    "spectrum": {"kind": "box", "hbar_eff": 0.01},
    "resonance": {"N": 1, "lambda": 0.0001},
    "packet": {"center": 11.25},
}


def findings_rows():
    return [c.row() for c in selfcheck.findings()]


def main_():
    report.write_csv(HERE / "selfcheck_findings.csv", "findings", selfcheck.LEDGER_HEADER, findings_rows())
    cfg = HERE / "box_times_config.json"
    cfg.write_text(json.dumps(BOX_TIMES_CONFIG, indent=2) + "\n", encoding="utf-8")
    out = HERE / "_times"
    main(["times", "--config", str(cfg), "--out", str(out), "--mode", "both"])
    (HERE / "times_both.json").write_bytes((out / "times.json").read_bytes())
    (out / "times.json").unlink()
    out.rmdir()


if __name__ == "__main__":
    main_()
