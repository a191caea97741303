"""Measured time scales from autocorrelation traces.

Everything here works on ``|A(t)|^2`` of a uniformly sampled trace, so results
do not depend on a global phase of ``A``.  Periods are measured relative to
the first sample, which makes them independent of where ``t = 0`` sits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from revival.errors import AnalysisInputError, DomainError, TraceTooShort
from revival.quasienergy import DEFINITION, TimeScalesReport

SCALES = ("T_cl", "T_rev", "T_sr")

# |A|^2 values closer than this are one plateau (roundoff of a unitary trace)
PLATEAU_TOL = 1e-9


@dataclass(frozen=True)
class Peak:
    t: float
    abs_A2: float


@dataclass
class RevivalReport:
    peaks: list
    T_cl_measured: float | None
    T_rev_measured: float | None
    spectrum_peaks: list = field(default_factory=list)
    t_collapse: float | None = None
    notes: list = field(default_factory=list)


def _sample_step(times: np.ndarray) -> float:
    steps = np.diff(times)
    dt = float(np.mean(steps))
    if not dt > 0 or np.max(np.abs(steps - dt)) > 1e-6 * dt:
        raise AnalysisInputError("trace must be uniformly sampled with increasing times")
    return dt


def _plateau_maxima(y: np.ndarray, tol: float = PLATEAU_TOL) -> list[int]:
    """Start index of every plateau that is higher than both neighbours.

    Samples within ``tol`` of the plateau's first value belong to it.  A plateau touching the start of the trace counts if it is higher than its
    right neighbour (or if it spans the whole trace); one touching only the
    end does not, since the signal may still be rising there.
    """
    n = len(y)
    out = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and abs(y[j + 1] - y[i]) <= tol:
            j += 1
        left_ok = i == 0 or y[i - 1] < y[i] - tol
        if j == n - 1:
            right_ok = i == 0
        else:
            right_ok = y[j + 1] < y[i] - tol
        if left_ok and right_ok:
            out.append(i)
        i = j + 1
    return out


def _refine(times, y, i, dt):
    if 0 < i < len(y) - 1 and y[i - 1] < y[i] - PLATEAU_TOL and y[i + 1] < y[i] - PLATEAU_TOL:
        ym, y0, yp = y[i - 1], y[i], y[i + 1]
        denom = ym - 2 * y0 + yp
        if denom < 0:
            delta = 0.5 * (ym - yp) / denom
            return times[i] + delta * dt, y0 - 0.25 * (ym - yp) * delta
    return times[i], y[i]


def detect_peaks(trace, threshold: float = 0.5, min_separation: float = 0.0) -> list[Peak]:
    """Local maxima of ``|A|^2`` at or above ``threshold``.

    Interior maxima are refined by a parabola through the three surrounding
    samples.  When two maxima are closer than ``min_separation`` the higher one
    survives.
    """
    times = np.asarray(trace.times, dtype=float)
    if len(times) < 3:
        raise TraceTooShort(f"need at least 3 samples, got {len(times)}")
    if not 0 < threshold < 1:
        raise DomainError("threshold must lie in (0, 1)")
    dt = _sample_step(times)
    y = np.abs(np.asarray(trace.values)) ** 2
    cands = [_refine(times, y, i, dt) for i in _plateau_maxima(y)]
    cands = [(float(t), float(v)) for t, v in cands if v >= threshold]
    if min_separation > 0 and len(cands) > 1:
        order = sorted(range(len(cands)), key=lambda k: (-cands[k][1], cands[k][0]))
        kept = []
        for k in order:
            if all(abs(cands[k][0] - cands[j][0]) >= min_separation for j in kept):
                kept.append(k)
        cands = [cands[k] for k in sorted(kept)]
    return [Peak(t, v) for t, v in cands]


def spectrum_peaks(trace, count: int = 5) -> list[tuple[float, float]]:
    """Strongest ``(angular frequency, amplitude)`` lines of ``|A|^2`` minus its mean."""
    times = np.asarray(trace.times, dtype=float)
    dt = _sample_step(times)
    y = np.abs(np.asarray(trace.values)) ** 2
    amp = np.abs(np.fft.rfft(y - y.mean())) * 2.0 / len(y)
    omega = 2 * np.pi * np.fft.rfftfreq(len(y), dt)
    idx = [k for k in range(1, len(amp) - 1) if amp[k] > amp[k - 1] and amp[k] >= amp[k + 1]]
    idx.sort(key=lambda k: (-amp[k], k))
    return [(float(omega[k]), float(amp[k])) for k in idx[:count]]


def moving_average(y: np.ndarray, width: int) -> np.ndarray:
    """Centered moving average over ``width`` samples; only full windows are kept."""
    width = max(1, int(width))
    c = np.concatenate(([0.0], np.cumsum(y)))
    return (c[width:] - c[:-width]) / width


def upper_envelope(y: np.ndarray, width: int) -> np.ndarray:
    """Running maximum over ``width`` samples, then a moving average of the same width.

    A plain moving average of ``|A|^2`` over one orbit is flat (it only keeps
    the diagonal sum of squared weights), so the peak heights are tracked first.
    Output sample ``k`` is centred on input sample ``k + width - 1``.
    """
    width = max(1, int(width))
    peaks = sliding_window_view(y, width).max(axis=1)
    return moving_average(peaks, width)


def measure_timescales(
    trace,
    expected_band: dict | None = None,
    threshold: float = 0.5,
    min_separation: float = 0.0,
    early_fraction: float = 0.1,
) -> RevivalReport:
    """Measure the classical period and the revival time of a trace.

    ``T_cl`` is the median spacing of consecutive peaks in the first
    ``early_fraction`` of the trace.  ``T_rev`` is the strongest maximum of the
    upper envelope of ``|A|^2`` (see :func:`upper_envelope`, one measured
    classical period wide) later than three collapse times.  Envelope maxima
    within 5% of the strongest one are treated as tied.  A full revival puts a
    classical peak at the centre of the recurrence, while the half revival,
    shifted by half an orbit, puts a trough there; so the tie goes to the
    candidate with the highest raw ``|A|^2`` within a quarter classical period
    of its centre, and then to the earliest.

    ``expected_band`` may map ``"T_cl"`` to an allowed spacing range and
    ``"T_rev"`` to a search window, both as ``(lo, hi)`` offsets from the first
    sample.  Scales that cannot be measured are ``None``, never extrapolated.
    """
    band = expected_band or {}
    times = np.asarray(trace.times, dtype=float)
    peaks = detect_peaks(trace, threshold, min_separation)
    dt = _sample_step(times)
    t0 = times[0]
    span = times[-1] - t0
    notes = []

    early = [p.t - t0 for p in peaks if p.t - t0 <= early_fraction * span]
    spacings = np.diff(early)
    if "T_cl" in band:
        lo, hi = band["T_cl"]
        spacings = spacings[(spacings >= lo) & (spacings <= hi)]
    T_cl = float(np.median(spacings)) if len(spacings) else None
    if T_cl is None:
        notes.append("T_cl absent: fewer than two early peaks above threshold")

    T_rev = None
    t_collapse = None
    if T_cl is not None:
        width = max(1, int(round(T_cl / dt)))
        y = np.abs(np.asarray(trace.values)) ** 2
        env = upper_envelope(y, width)
        env_t = times[: len(env)] + (width - 1) * dt - t0
        below = np.nonzero(env < 0.5 * env[0])[0] if len(env) else []
        if len(below) == 0:
            notes.append("T_rev absent: envelope never collapses")
        else:
            t_collapse = float(env_t[below[0]])
            lo, hi = band.get("T_rev", (3.0 * t_collapse, math.inf))
            lo = max(lo, 3.0 * t_collapse)
            cand = [
                k for k in range(1, len(env) - 1)
                if lo <= env_t[k] <= hi and env[k] > env[k - 1] and env[k] >= env[k + 1]
            ]
            if not cand:
                notes.append("T_rev absent: no envelope maximum beyond three collapse times")
            else:
                top = max(env[k] for k in cand)
                tied = [k for k in cand if env[k] >= 0.95 * top]

                def raw_peak(k):
                    sel = np.abs(times - t0 - env_t[k]) <= 0.25 * T_cl
                    return float(np.max(y[sel]))

                best = max(tied, key=lambda k: (round(raw_peak(k), 9), -k))
                T_rev = float(env_t[best])
    return RevivalReport(
        peaks=peaks,
        T_cl_measured=T_cl,
        T_rev_measured=T_rev,
        spectrum_peaks=spectrum_peaks(trace),
        t_collapse=t_collapse,
        notes=notes,
    )


@dataclass(frozen=True)
class ComparisonRow:
    scale: str
    mode: str
    predicted: float
    measured: float
    rel_error: float


def compare(report: RevivalReport, predictions: list[TimeScalesReport]):
    """Relative error of each measured scale against each prediction.

    Definition-mode classical periods are compared in the lab frame, since that
    is where traces are recorded.  Returns ``(rows, omitted)`` where
    ``omitted`` lists ``(scale, mode, reason)``.
    """
    measured = {"T_cl": report.T_cl_measured, "T_rev": report.T_rev_measured, "T_sr": None}
    rows, omitted = [], []
    for pred in predictions:
        for scale in SCALES:
            value = getattr(pred, scale)
            if scale == "T_cl" and pred.mode == DEFINITION and pred.T_cl_lab is not None:
                value = pred.T_cl_lab
            m = measured[scale]
            if scale == "T_sr":
                omitted.append((scale, pred.mode, "super-revival is not measured from traces"))
                continue
            if m is None:
                omitted.append((scale, pred.mode, "not measured in this trace"))
                continue
            if value == 0.0 or math.isinf(value):
                omitted.append((scale, pred.mode, f"prediction is {value!r}"))
                continue
            rows.append(ComparisonRow(scale, pred.mode, value, m, abs(m - value) / abs(value)))
    return rows, omitted
