import json
import math

import pytest

from revival.config import ConfigError, RunConfig, fnv1a_64, write_config

from conftest import box_config


def test_fnv_reference_vectors():
    assert fnv1a_64(b"") == 0xCBF29CE484222325
    assert fnv1a_64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a_64(b"foobar") == 0x85944171F73967E8


def test_defaults_round_trip():
    cfg = RunConfig()
    again = RunConfig.from_dict(cfg.to_dict())
    assert again == cfg
    assert again.fingerprint() == cfg.fingerprint()


def test_lambda_key():
    cfg = RunConfig.from_dict({"resonance": {"lambda": 0.2}})
    assert cfg.resonance.lam == 0.2
    assert cfg.to_dict()["resonance"]["lambda"] == 0.2
    with pytest.raises(ConfigError, match="lam"):
        RunConfig.from_dict({"resonance": {"lam": 0.2}})


@pytest.mark.parametrize(
    "data",
    [
        {"bogus": {}},
        {"spectrum": {"kind": "box", "extra": 1}},
        {"spectrum": []},
        {"spectrum": {"hbar_eff": "small"}},
        {"resonance": {"N": 1.5}},
        {"evolution": {"rwa": 1}},
        {"evolution": {"window": [1.5, 20]}},
        {"analysis": {"bands": {"T_sr": [1, 2]}}},
        {"spectrum": {"hbar_eff": None}},
    ],
)
def test_schema_rejections(data):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(data)


def test_invalid_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        RunConfig.load(p)


def test_fingerprint_ignores_output_and_tracks_science():
    a = RunConfig.from_dict(box_config())
    b = RunConfig.from_dict(box_config(output={"dir": "elsewhere", "svg": True}))
    c = RunConfig.from_dict(box_config(resonance={"lambda": 0.051}))
    assert a.fingerprint() == b.fingerprint()
    assert a.fingerprint() != c.fingerprint()
    assert len(a.fingerprint()) == 16
    assert a.stamp() == f"revival 0.1.0 config={a.fingerprint()}"


def test_fingerprint_independent_of_key_order(tmp_path):
    data = box_config()
    reordered = {k: dict(reversed(list(v.items()))) for k, v in reversed(list(data.items()))}
    assert RunConfig.from_dict(data).fingerprint() == RunConfig.from_dict(reordered).fingerprint()


def test_write_and_load(tmp_path):
    cfg = RunConfig.from_dict(box_config())
    write_config(cfg, tmp_path / "c.json")
    assert RunConfig.load(tmp_path / "c.json") == cfg
    json.loads((tmp_path / "c.json").read_text())


def test_resolved_models():
    cfg = RunConfig.from_dict(box_config(packet={"center": None}))
    r_used, r_exact = cfg.resonance_level()
    assert r_used == 10.0
    assert r_exact == pytest.approx(1 / (math.pi**2 * 0.01))
    assert cfg.center() == 10.0
    assert cfg.window() == (1, 28)
    p = cfg.resonance_params()
    assert (p.N, p.r, p.lam, p.V, p.hbar_eff) == (1, 10.0, 0.05, 1.0, 0.01)
    exact = RunConfig.from_dict(box_config(resonance={"round_r": False}))
    assert exact.resonance_params().r == pytest.approx(r_exact)
    fixed = RunConfig.from_dict(box_config(resonance={"r": 12.0}, evolution={"window": [2, 50]}))
    assert fixed.resonance_level() == (12.0, 12.0)
    assert fixed.window() == (2, 50)
    assert fixed.evolution_config().dt == pytest.approx(2 * math.pi / 100)
