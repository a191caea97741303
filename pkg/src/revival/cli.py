"""Command line interface: ``revival <subcommand> [options]``.

Every subcommand reads one :class:`~revival.config.RunConfig` (``--config``,
defaults otherwise), writes its files under ``--out`` and stamps line 1 of
each file with the tool version and the config fingerprint.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from revival import __version__, analysis, mathieu, quasienergy as qe, report, selfcheck
from revival.config import ConfigError, RunConfig, fnv1a_64
from revival.errors import AnalysisInputError, RevivalError, TraceTooShort
from revival.propagate import AutocorrTrace, evolve, init_gaussian
from revival.spectrum import coupling_matrix

SWEEP_PARAMS = ("lambda", "hbar_eff", "delta_n")
SWEEP_HEADER = [
    "param", "value",
    "T_cl_def", "T_cl_paper", "T_rev_def", "T_rev_paper", "T_sr_def", "T_sr_paper",
    "T_cl_lab_def", "T_cl_meas", "T_rev_meas",
]
REPORT_HEADER = ["scale", "mode", "predicted", "measured", "rel_error"]


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _args_stamp(cfg: RunConfig, **extra) -> str:
    """Config stamp extended with a hash of command arguments that change the numbers."""
    blob = json.dumps(extra, sort_keys=True, separators=(",", ":"))
    return f"{cfg.stamp()} args={fnv1a_64(blob.encode('utf-8')):016x}"


# ---------------------------------------------------------------- config


def load_config(args) -> RunConfig:
    if args.config:
        try:
            cfg = RunConfig.load(args.config)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    else:
        cfg = RunConfig()
    if args.mode is not None:
        cfg.predict.mode = args.mode
    if args.convention is not None:
        cfg.predict.convention = args.convention
    if args.out is not None:
        cfg.output.dir = args.out
    if args.svg:
        cfg.output.svg = True
    if getattr(args, "rwa", False):
        cfg.evolution.rwa = True
    return cfg


def predictions(cfg: RunConfig) -> list[qe.TimeScalesReport]:
    return qe.time_scales(
        cfg.spectrum_model(),
        cfg.resonance_params(),
        mode=cfg.predict.mode,
        convention=cfg.predict.convention,
        center=cfg.center(),
        strict=cfg.predict.strict,
    )


def run_trace(cfg: RunConfig) -> AutocorrTrace:
    lo, hi = cfg.window()
    state = init_gaussian(cfg.center(), cfg.packet.delta_n, lo, hi)
    W = coupling_matrix(cfg.coupling_model(), lo, hi, cfg.resonance.N)
    trace, _ = evolve(state, cfg.spectrum_model(), W, cfg.resonance_params(), cfg.evolution_config())
    return trace


# ---------------------------------------------------------------- times


TIMES_HEADER = ["mode", "T_cl", "T_rev", "T_sr", "T_cl_lab", "nu_r", "q_used"]


def cmd_times(cfg: RunConfig, args) -> int:
    reps = predictions(cfg)
    r_used, r_exact = cfg.resonance_level()
    out = Path(cfg.output.dir)
    payload = {"r_used": r_used, "r_exact": r_exact, "reports": [r.as_dict() for r in reps]}
    report.write_json(out / "times.json", cfg.stamp(), payload)
    rows = [[r.mode, r.T_cl, r.T_rev, r.T_sr, r.T_cl_lab, r.nu_r, r.q_used] for r in reps]
    print(f"# {cfg.stamp()}")
    print(f"r = {report.fmt(r_used)} (exact {report.fmt(r_exact)})")
    print(report.aligned_table(TIMES_HEADER, rows))
    if reps[0].discrepancy:
        print("\ndiscrepancy (relative gap, paper vs definition)")
        gaps = reps[0].discrepancy
        print(report.aligned_table(["scale", "gap"], [[k, gaps[k]] for k in sorted(gaps)]))
    for w in reps[0].warnings:
        _warn(w)
    return 0


# ---------------------------------------------------------------- mathieu


def cmd_mathieu(cfg: RunConfig, args) -> int:
    rows = []
    for nu in args.nu:
        for q in args.q:
            a_s = mathieu.char_value_series(nu, q)
            a_m = mathieu.char_value_matrix(nu, q, args.M).a
            rows.append([nu, q, a_s, a_m, abs(a_s - a_m)])
    stamp = _args_stamp(cfg, nu=args.nu, q=args.q, M=args.M)
    path = report.write_csv(Path(cfg.output.dir) / "mathieu.csv", stamp, ["nu", "q", "a_series", "a_matrix", "gap"], rows)
    print(path)
    return 0


# ---------------------------------------------------------------- evolve


def _marks(cfg: RunConfig) -> dict:
    try:
        reps = qe.time_scales(
            cfg.spectrum_model(), cfg.resonance_params(), mode=qe.DEFINITION,
            convention=cfg.predict.convention, center=cfg.center(), strict=cfg.predict.strict,
        )
    except RevivalError:
        return {}
    d = reps[0]
    return {"T_cl (lab)": d.T_cl_lab, "T_rev": d.T_rev}


def cmd_evolve(cfg: RunConfig, args) -> int:
    trace = run_trace(cfg)
    out = Path(cfg.output.dir)
    path = report.write_trace(out / "trace.csv", cfg.stamp(), trace)
    print(path)
    if cfg.output.svg:
        from revival.plotting import plot_trace

        title = "RWA" if cfg.evolution.rwa else "full"
        print(plot_trace(trace, out / "trace.svg", cfg.stamp(), _marks(cfg), title))
    print(f"samples={len(trace.times)} max_norm_drift={report.fmt(float(np.max(trace.norm_drift)))}")
    return 0


# ---------------------------------------------------------------- analyze


def read_trace(path) -> tuple[AutocorrTrace, str]:
    """Trace CSV written by ``evolve``; returns the trace and a content hash."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise AnalysisInputError(f"cannot read trace: {exc}") from None
    _, header, rows = report.read_csv(path)
    if not rows:
        raise TraceTooShort(f"{path}: no samples")
    try:
        cols = {name: i for i, name in enumerate(header)}
        t = np.array([float(r[cols["t"]]) for r in rows])
        re = np.array([float(r[cols["re_A"]]) for r in rows])
        im = np.array([float(r[cols["im_A"]]) for r in rows])
    except (KeyError, IndexError, ValueError) as exc:
        raise AnalysisInputError(f"{path}: malformed trace ({exc})") from None
    return AutocorrTrace(t, re + 1j * im, np.zeros_like(t)), f"{fnv1a_64(raw):016x}"


def _load_predictions(path) -> list[qe.TimeScalesReport]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        reps = []
        for d in doc["reports"]:
            d = {k: (math.inf if v == "inf" else v) for k, v in d.items()}
            reps.append(qe.TimeScalesReport(**d))
        return reps
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise AnalysisInputError(f"cannot read predictions {path}: {exc}") from None


def cmd_analyze(cfg: RunConfig, args) -> int:
    preds = _load_predictions(args.predictions) if args.predictions else predictions(cfg)
    out = Path(cfg.output.dir)
    for name in args.traces:
        trace, digest = read_trace(name)
        rep = analysis.measure_timescales(
            trace, cfg.bands(), cfg.analysis.threshold, cfg.analysis.min_separation
        )
        rows, omitted = analysis.compare(rep, preds)
        stamp = f"{cfg.stamp()} trace={digest}"
        stem = Path(name).stem
        comments = [f"omitted {s} {m}: {why}" for s, m, why in omitted]
        comments += [f"note: {n}" for n in rep.notes]
        comments.append(f"t_collapse={report.fmt(rep.t_collapse)}")
        table = [[r.scale, r.mode, r.predicted, r.measured, r.rel_error] for r in rows]
        print(report.write_csv(out / f"{stem}_report.csv", stamp, REPORT_HEADER, table, comments))
        print(report.write_csv(out / f"{stem}_peaks.csv", stamp, ["t", "abs_A2"], [[p.t, p.abs_A2] for p in rep.peaks]))
        print(report.aligned_table(REPORT_HEADER, table))
        if cfg.output.svg:
            from revival.plotting import plot_trace

            marks = {"T_cl measured": rep.T_cl_measured, "T_rev measured": rep.T_rev_measured}
            print(plot_trace(trace, out / f"{stem}_analysis.svg", stamp, marks))
    return 0


# ---------------------------------------------------------------- sweep


def _with_value(cfg: RunConfig, param: str, value: float) -> RunConfig:
    c = RunConfig.from_dict(cfg.to_dict())
    if param == "lambda":
        c.resonance.lam = value
    elif param == "hbar_eff":
        c.spectrum.hbar_eff = value
    else:
        c.packet.delta_n = value
    return c


def sweep_point(cfg_dict: dict, param: str, value: float, measure: bool) -> tuple[list, list]:
    """One grid point: ``(row, messages)``.  Module level so it can run in a worker."""
    cfg = _with_value(RunConfig.from_dict(cfg_dict), param, value)
    cfg.predict.mode = "both"
    msgs = []
    vals = {}
    try:
        d, p = predictions(cfg)
        vals = {
            "T_cl_def": d.T_cl, "T_cl_paper": p.T_cl, "T_rev_def": d.T_rev, "T_rev_paper": p.T_rev,
            "T_sr_def": d.T_sr, "T_sr_paper": p.T_sr, "T_cl_lab_def": d.T_cl_lab,
        }
        if measure:
            rep = analysis.measure_timescales(
                run_trace(cfg), cfg.bands(), cfg.analysis.threshold, cfg.analysis.min_separation
            )
            vals["T_cl_meas"] = rep.T_cl_measured
            vals["T_rev_meas"] = rep.T_rev_measured
    except RevivalError as exc:
        msgs.append(f"{param}={report.fmt(value)}: {exc}")
    return [param, value] + [vals.get(k) for k in SWEEP_HEADER[2:]], msgs


def _dedupe(values: list[float]) -> list[float]:
    seen, out = set(), []
    for v in values:
        if v in seen:
            continue
        seen.add(v)
        out.append(v)
    if len(out) < len(values):
        _warn(f"duplicate grid values removed ({len(values) - len(out)})")
    return out


def cmd_sweep(cfg: RunConfig, args) -> int:
    grid = _dedupe(args.values)
    base = cfg.to_dict()
    jobs = [(base, args.param, v, args.measure) for v in grid]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(sweep_point, *zip(*jobs)))
    else:
        results = [sweep_point(*j) for j in jobs]
    rows = [r for r, _ in results]
    comments = [m for _, ms in results for m in ms]
    for m in comments:
        _warn(m)
    stamp = _args_stamp(cfg, param=args.param, values=grid, measure=args.measure)
    out = Path(cfg.output.dir)
    print(report.write_csv(out / "sweep.csv", stamp, SWEEP_HEADER, rows, comments))
    if cfg.output.svg:
        from revival.plotting import plot_sweep

        cols = {k: [r[SWEEP_HEADER.index(k)] for r in rows] for k in ("T_cl_def", "T_rev_def", "T_sr_def")}
        print(plot_sweep(args.param, grid, cols, out / "sweep.svg", stamp))
    return 0


# ---------------------------------------------------------------- selfcheck


def cmd_selfcheck(cfg: RunConfig, args) -> int:
    rows, ok = selfcheck.run_selfcheck(beta_scale=args.mutate_beta)
    stamp = _args_stamp(cfg, mutate_beta=args.mutate_beta)
    path = report.write_csv(Path(cfg.output.dir) / "selfcheck.csv", stamp, selfcheck.LEDGER_HEADER, [c.row() for c in rows])
    print(path)
    oracles = [c for c in rows if c.kind == selfcheck.ORACLE]
    failed = [c.check for c in oracles if not c.passed]
    n_find = len(rows) - len(oracles)
    print(f"oracles: {len(oracles) - len(failed)}/{len(oracles)} pass; findings: {n_find}")
    for name in failed:
        print(f"FAIL {name}")
    return 0 if ok else 1


# ---------------------------------------------------------------- entry


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=d, help="JSON run configuration")
    p.add_argument("--out", default=d, help="output directory (overrides output.dir)")
    p.add_argument("--svg", action="store_true", default=argparse.SUPPRESS if suppress else False,
                   help="also write SVG figures")
    p.add_argument("--mode", choices=("definition", "paper", "both"), default=d)
    p.add_argument("--convention", choices=("paperq", "stdq"), default=d)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="revival", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"revival {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
        p.set_defaults(func=func)
        return p

    add("times", cmd_times, "analytic time scales")
    p = add("mathieu", cmd_mathieu, "tabulate Mathieu characteristic values")
    p.add_argument("--nu", type=_floats, default=[1.7, 2.5, 3.3])
    p.add_argument("--q", type=_floats, default=[0.05, 0.1, 0.2])
    p.add_argument("--M", type=int, default=32, help="Hill matrix half-size")
    p = add("evolve", cmd_evolve, "integrate the driven system and write |A(t)|")
    p.add_argument("--rwa", action="store_true", help="use the rotating-wave system")
    p = add("analyze", cmd_analyze, "measure time scales in trace files")
    p.add_argument("traces", nargs="+")
    p.add_argument("--predictions", help="times.json to compare against (default: computed from config)")
    p = add("sweep", cmd_sweep, "time scales over a parameter grid")
    p.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    p.add_argument("--values", type=_floats, required=True, help="comma-separated grid")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--measure", action="store_true", help="also integrate and measure each point")
    p = add("selfcheck", cmd_selfcheck, "run every oracle and the discrepancy ledger")
    p.add_argument("--mutate-beta", type=float, default=1.0, help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return args.func(cfg, args)
    except RevivalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
