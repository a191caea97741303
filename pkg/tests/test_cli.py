import json
import math

import numpy as np
import pytest

from revival import report
from revival.config import RunConfig

from conftest import GOLDEN, box_config

# lambda V / hbar = 5 spreads the packet; the default window is too narrow
WIDE = box_config(evolution={"window": [1, 60]})


def test_times_matches_golden(cli, tmp_path):
    code, out, _ = cli("times", "--config", GOLDEN / "box_times_config.json", "--out", tmp_path, "--mode", "both")
    assert code == 0
    assert (tmp_path / "times.json").read_bytes() == (GOLDEN / "times_both.json").read_bytes()
    stamp = RunConfig.load(GOLDEN / "box_times_config.json").stamp()
    assert out.splitlines()[0] == f"# {stamp}"
    assert "discrepancy" in out


def test_times_table_modes(cli, tmp_path, write_config):
    cfg = write_config(box_config(packet={"center": 11.25}))
    code, out, _ = cli("times", "--config", cfg, "--out", tmp_path, "--mode", "definition")
    assert code == 0
    doc = json.loads((tmp_path / "times.json").read_text())
    assert [r["mode"] for r in doc["reports"]] == ["definition"]
    assert doc["r_used"] == 10.0
    assert list(doc)[0] == "stamp"


def test_times_convention_flag(cli, tmp_path, write_config):
    cfg = write_config(box_config(packet={"center": 11.25}))
    cli("times", "--config", cfg, "--out", tmp_path / "a", "--convention", "paperq")
    cli("times", "--config", cfg, "--out", tmp_path / "b", "--convention", "stdq")
    qa = json.loads((tmp_path / "a" / "times.json").read_text())["reports"][0]["q_used"]
    qb = json.loads((tmp_path / "b" / "times.json").read_text())["reports"][0]["q_used"]
    assert qb == pytest.approx(-qa / 2)


def test_resonant_order_exit_2(cli, tmp_path, write_config):
    cfg = write_config(box_config(packet={"center": 10.5}))
    code, _, err = cli("times", "--config", cfg, "--out", tmp_path)
    assert code == 2
    assert "non-resonant" in err
    assert not (tmp_path / "times.json").exists()


def test_missing_config_exit_2(cli, tmp_path):
    code, _, err = cli("times", "--config", tmp_path / "nope.json", "--out", tmp_path)
    assert code == 2 and err.startswith("error:")


def test_zero_drive_paper_super_revival_is_inf(cli, tmp_path, write_config):
    cfg = write_config(box_config(resonance={"lambda": 0.0}, packet={"center": 11.25}))
    code, out, _ = cli("times", "--config", cfg, "--out", tmp_path, "--mode", "paper")
    assert code == 0
    doc = json.loads((tmp_path / "times.json").read_text())
    assert doc["reports"][0]["T_sr"] == "inf"
    assert "inf" in out


def test_mathieu_table(cli, tmp_path):
    code, _, _ = cli("mathieu", "--out", tmp_path, "--nu", "2.5,3.5", "--q", "0.1")
    assert code == 0
    stamp, header, rows = report.read_csv(tmp_path / "mathieu.csv")
    assert header == ["nu", "q", "a_series", "a_matrix", "gap"]
    assert len(rows) == 2
    assert float(rows[0][4]) < 1e-6
    assert " args=" in stamp


def test_evolve_schema_same_with_rwa(cli, tmp_path, write_config):
    cfg = write_config(WIDE)
    assert cli("evolve", "--config", cfg, "--out", tmp_path / "full")[0] == 0
    assert cli("evolve", "--config", cfg, "--out", tmp_path / "rwa", "--rwa")[0] == 0
    s1, h1, r1 = report.read_csv(tmp_path / "full" / "trace.csv")
    s2, h2, r2 = report.read_csv(tmp_path / "rwa" / "trace.csv")
    assert h1 == h2 == ["t", "re_A", "im_A", "abs_A2", "norm_drift"]
    assert [r[0] for r in r1] == [r[0] for r in r2]
    assert s1 == RunConfig.load(cfg).stamp()
    assert s2 != s1
    assert float(r1[0][1]) == 1.0


def test_evolve_svg(cli, tmp_path, write_config):
    cfg = write_config(WIDE)
    assert cli("evolve", "--config", cfg, "--out", tmp_path, "--svg")[0] == 0
    svg = (tmp_path / "trace.svg").read_text()
    assert svg.startswith("<?xml") or svg.lstrip().startswith("<")
    assert RunConfig.load(cfg).stamp() in svg


def test_reruns_are_byte_identical(cli, tmp_path, write_config):
    cfg = write_config(WIDE)
    for sub in ("a", "b"):
        assert cli("evolve", "--config", cfg, "--out", tmp_path / sub, "--svg")[0] == 0
    for name in ("trace.csv", "trace.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_analyze_empty_trace_exit_4(cli, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    code, _, err = cli("analyze", empty, "--out", tmp_path)
    assert code == 4
    assert "no samples" in err


def test_analyze_malformed_trace_exit_4(cli, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,x\n1,2\n")
    assert cli("analyze", bad, "--out", tmp_path)[0] == 4


def test_analyze_end_to_end(cli, tmp_path, write_config):
    cfg = write_config(box_config(resonance={"lambda": 0.0}, evolution={"t_max": 150.0}, packet={"center": 11.25, "delta_n": 1.5}))
    assert cli("evolve", "--config", cfg, "--out", tmp_path)[0] == 0
    assert cli("times", "--config", cfg, "--out", tmp_path, "--mode", "both")[0] == 0
    code, _, _ = cli("analyze", tmp_path / "trace.csv", "--config", cfg, "--out", tmp_path,
                     "--predictions", tmp_path / "times.json")
    assert code == 0
    stamp, header, rows = report.read_csv(tmp_path / "trace_report.csv")
    assert header == ["scale", "mode", "predicted", "measured", "rel_error"]
    assert rows and all(r[3] and r[4] for r in rows)
    assert "trace=" in stamp
    table = {(r[0], r[1]): float(r[3]) for r in rows}
    assert table[("T_rev", "definition")] == pytest.approx(4 / (math.pi * 0.01), rel=0.01)
    _, _, peaks = report.read_csv(tmp_path / "trace_peaks.csv")
    assert len(peaks) > 5


def test_evolve_edge_population_exit_3(cli, tmp_path, write_config):
    code, _, err = cli("evolve", "--config", write_config(box_config()), "--out", tmp_path)
    assert code == 3 and "widen the window" in err


def test_analyze_bad_predictions_exit_4(cli, tmp_path, write_config):
    cfg = write_config(WIDE)
    cli("evolve", "--config", cfg, "--out", tmp_path)
    (tmp_path / "p.json").write_text("{}")
    assert cli("analyze", tmp_path / "trace.csv", "--predictions", tmp_path / "p.json", "--out", tmp_path)[0] == 4


def _sweep_rows(path):
    _, header, rows = report.read_csv(path)
    return header, rows


def test_sweep_single_point_equals_times(cli, tmp_path, write_config):
    cfg = write_config(box_config(packet={"center": 11.25}))
    cli("times", "--config", cfg, "--out", tmp_path, "--mode", "both")
    cli("sweep", "--config", cfg, "--out", tmp_path, "--param", "lambda", "--values", "0.05")
    header, rows = _sweep_rows(tmp_path / "sweep.csv")
    d, p = json.loads((tmp_path / "times.json").read_text())["reports"]
    row = dict(zip(header, rows[0]))
    assert float(row["T_cl_def"]) == d["T_cl"]
    assert float(row["T_rev_paper"]) == p["T_rev"]
    assert float(row["T_sr_def"]) == d["T_sr"]


def test_sweep_dedupes_and_is_order_stable(cli, tmp_path, write_config):
    cfg = write_config(box_config(packet={"center": 11.25}))
    code, _, err = cli("sweep", "--config", cfg, "--out", tmp_path / "a", "--param", "lambda",
                       "--values", "0.04,0.02,0.04,0.01")
    assert code == 0 and "duplicate" in err
    code, _, _ = cli("sweep", "--config", cfg, "--out", tmp_path / "b", "--param", "lambda",
                     "--values", "0.04,0.02,0.01", "--jobs", "2")
    assert code == 0
    _, a = _sweep_rows(tmp_path / "a" / "sweep.csv")
    _, b = _sweep_rows(tmp_path / "b" / "sweep.csv")
    assert a == b
    assert [float(r[1]) for r in a] == [0.04, 0.02, 0.01]


def test_sweep_super_revival_scales_as_inverse_square(cli, tmp_path, write_config):
    cfg = write_config(box_config(packet={"center": 11.25}))
    cli("sweep", "--config", cfg, "--out", tmp_path, "--param", "lambda", "--values", "0.005,0.01,0.02,0.04", "--svg")
    header, rows = _sweep_rows(tmp_path / "sweep.csv")
    i = header.index("T_sr_def")
    lam = np.array([float(r[1]) for r in rows])
    tsr = np.array([abs(float(r[i])) for r in rows])
    slope = np.polyfit(np.log(lam), np.log(tsr), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.05)
    assert (tmp_path / "sweep.svg").exists()


def test_sweep_domain_failure_becomes_comment(cli, tmp_path, write_config):
    cfg = write_config(box_config(packet={"center": 10.5}))
    code, _, err = cli("sweep", "--config", cfg, "--out", tmp_path, "--param", "lambda", "--values", "0.05")
    assert code == 0 and "non-resonant" in err
    text = (tmp_path / "sweep.csv").read_text()
    assert "# lambda=0.05" in text


def test_selfcheck_passes_and_mutation_fails(cli, tmp_path):
    code, out, _ = cli("selfcheck", "--out", tmp_path / "ok")
    assert code == 0
    assert "findings:" in out
    _, header, rows = report.read_csv(tmp_path / "ok" / "selfcheck.csv")
    assert header[-1] == "status"
    assert {r[-1] for r in rows} <= {"pass", "finding"}
    code, out, _ = cli("selfcheck", "--out", tmp_path / "bad", "--mutate-beta", "1.01")
    assert code != 0
    assert "FAIL beta_from_spectrum_fd" in out


def test_global_flags_before_subcommand(cli, tmp_path):
    code, _, _ = cli("--out", tmp_path, "mathieu", "--nu", "2.5", "--q", "0.1")
    assert code == 0
    assert (tmp_path / "mathieu.csv").exists()
