"""Run configuration: strict JSON schema, defaults, and the config fingerprint."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from revival import __version__
from revival.errors import DomainError
from revival.propagate import EvolutionConfig, default_window
from revival.quasienergy import ResonanceParams
from revival.spectrum import CouplingModel, SpectrumModel, find_resonant_level

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


class ConfigError(DomainError):
    pass


@dataclass
class SpectrumSection:
    kind: str = "box"
    hbar_eff: float = 0.01
    c: float = 1.0
    k: float = 2.0


@dataclass
class CouplingSection:
    mode: str = "constant"
    V: float = 1.0


@dataclass
class ResonanceSection:
    # JSON uses "lambda" for the modulation strength
    _ALIASES = {"lambda": "lam"}

    N: int = 1
    r: float | None = None
    round_r: bool = True
    lam: float = 0.05


@dataclass
class PacketSection:
    center: float | None = None
    delta_n: float = 2.0


@dataclass
class EvolutionSection:
    frame: str = "bare"
    rwa: bool = False
    integrator: str = "expmid"
    dt: float = 2 * math.pi / 100
    t_max: float = 100.0
    sample_stride: int = 1
    window: list | None = None


@dataclass
class AnalysisSection:
    threshold: float = 0.5
    min_separation: float = 0.0
    bands: dict = field(default_factory=dict)


@dataclass
class PredictSection:
    mode: str = "both"
    convention: str = "paperq"
    strict: bool = False


@dataclass
class OutputSection:
    dir: str = "out"
    svg: bool = False


@dataclass
class RunConfig:
    spectrum: SpectrumSection = field(default_factory=SpectrumSection)
    coupling: CouplingSection = field(default_factory=CouplingSection)
    resonance: ResonanceSection = field(default_factory=ResonanceSection)
    packet: PacketSection = field(default_factory=PacketSection)
    evolution: EvolutionSection = field(default_factory=EvolutionSection)
    analysis: AnalysisSection = field(default_factory=AnalysisSection)
    predict: PredictSection = field(default_factory=PredictSection)
    output: OutputSection = field(default_factory=OutputSection)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return _build(cls, data, "config")

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["resonance"]["lambda"] = d["resonance"].pop("lam")
        return d

    def science_dict(self) -> dict:
        """Everything that can change numbers; output placement is excluded."""
        d = self.to_dict()
        d.pop("output")
        return d

    def fingerprint(self) -> str:
        blob = json.dumps(self.science_dict(), sort_keys=True, separators=(",", ":"))
        return f"{fnv1a_64(blob.encode('utf-8')):016x}"

    def stamp(self) -> str:
        return f"revival {__version__} config={self.fingerprint()}"

    # resolved model objects

    def spectrum_model(self) -> SpectrumModel:
        s = self.spectrum
        return SpectrumModel(s.kind, s.hbar_eff, s.c, s.k)

    def coupling_model(self) -> CouplingModel:
        return CouplingModel(self.coupling.mode, self.coupling.V)

    def resonance_level(self) -> tuple[float, float]:
        """``(r used, exact resonant r)``; they differ when ``round_r`` is set."""
        model = self.spectrum_model()
        res = self.resonance
        if res.r is not None:
            return float(res.r), float(res.r)
        exact = find_resonant_level(model, res.N)
        return (float(round(exact)) if res.round_r else exact), exact

    def resonance_params(self) -> ResonanceParams:
        r, _ = self.resonance_level()
        return ResonanceParams(
            self.resonance.N, r, self.resonance.lam, self.coupling.V, self.spectrum.hbar_eff
        )

    def center(self) -> float:
        if self.packet.center is not None:
            return float(self.packet.center)
        return self.resonance_level()[0]

    def window(self) -> tuple[int, int]:
        if self.evolution.window is not None:
            lo, hi = self.evolution.window
            return int(lo), int(hi)
        return default_window(self.center(), self.packet.delta_n, self.resonance.N)

    def evolution_config(self) -> EvolutionConfig:
        e = self.evolution
        return EvolutionConfig(
            dt=e.dt,
            t_max=e.t_max,
            frame=e.frame,
            rwa=e.rwa,
            sample_stride=e.sample_stride,
            integrator=e.integrator,
        )

    def bands(self) -> dict:
        return {k: tuple(v) for k, v in self.analysis.bands.items()}


def _build(cls, data, where):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    aliases = getattr(cls, "_ALIASES", {})
    names = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        name = aliases.get(key, key)
        if name not in names or (key != name and key in names) or key in aliases.values():
            raise ConfigError(f"{where}: unknown key {key!r}")
        f = names[name]
        sub = f.default_factory if dataclasses.is_dataclass(f.default_factory) else None
        if sub is not None:
            kwargs[name] = _build(sub, value, f"{where}.{key}")
        else:
            kwargs[name] = _coerce(f, value, f"{where}.{key}")
    return cls(**kwargs)


def _coerce(f, value, where):
    default = f.default
    if value is None:
        if default is None or f.type.endswith("None"):
            return None
        raise ConfigError(f"{where}: may not be null")
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer")
        return value
    if isinstance(default, float) or f.type.startswith("float"):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number")
        return float(value)
    if f.name == "window":
        if not (isinstance(value, list) and len(value) == 2 and all(isinstance(v, int) for v in value)):
            raise ConfigError(f"{where}: expected [n_min, n_max]")
        return list(value)
    if f.name == "bands":
        if not isinstance(value, dict) or any(
            k not in ("T_cl", "T_rev") or not (isinstance(v, list) and len(v) == 2) for k, v in value.items()
        ):
            raise ConfigError(f"{where}: expected {{'T_cl'|'T_rev': [lo, hi]}}")
        return {k: [float(x) for x in v] for k, v in value.items()}
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string")
        return value
    return value


def write_config(cfg: RunConfig, path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
