"""SVG figures for traces and sweeps.

Figures are written with fixed metadata and a hash salt taken from the config
fingerprint so that reruns produce identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _style():
    plt.rcParams.update(
        {
            "font.size": 10,
            "axes.linewidth": 0.8,
            "lines.linewidth": 0.9,
            "svg.fonttype": "path",
        }
    )


def _save(fig, path, stamp: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": stamp}):
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    # stamp on line 1 next to the XML declaration
    text = path.read_text(encoding="utf-8")
    first, _, rest = text.partition("\n")
    path.write_text(f"{first}<!-- {stamp} -->\n{rest}", encoding="utf-8")
    return path


def plot_trace(trace, path, stamp: str, marks: dict | None = None, title: str = ""):
    """``|A(t)|^2`` against time, with optional vertical lines at predicted times."""
    _style()
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.plot(trace.times, trace.abs2, color="k")
    for i, (label, t) in enumerate(sorted((marks or {}).items())):
        if t is not None and math.isfinite(t) and trace.times[0] <= t <= trace.times[-1]:
            ax.axvline(t, color=f"C{i}", ls="--", lw=0.8, label=label)
    if marks:
        ax.legend(loc="upper right", frameon=False, fontsize=8)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$|A(t)|^2$")
    ax.set_ylim(0, 1.05)
    ax.set_xlim(trace.times[0], trace.times[-1])
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    return _save(fig, path, stamp)


def plot_sweep(param: str, values, columns: dict, path, stamp: str):
    """Log-log time scales against the swept parameter."""
    _style()
    fig, ax = plt.subplots(figsize=(5, 3.6))
    for i, (name, ys) in enumerate(sorted(columns.items())):
        pts = [(x, y) for x, y in zip(values, ys) if y is not None and x > 0 and 0 < y < math.inf]
        if pts:
            xs, yv = zip(*pts)
            ax.loglog(xs, yv, marker="o", ms=3, color=f"C{i}", label=name)
    ax.set_xlabel(param)
    ax.set_ylabel("time")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return _save(fig, path, stamp)
