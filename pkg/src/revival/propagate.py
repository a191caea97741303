"""Direct integration of the driven Schrödinger equation in the level basis.

The Hamiltonian is ``H(t) = diag(E_n) + lam * sin(t) * W`` on a finite window of
levels.  Amplitudes can be carried in the bare (lab) frame or in the rotating
frame ``C_n -> C_n exp(+i phi_n t)`` with ``phi_n = (E_r + (n - r) hbar / N) / hbar``.
Whatever the frame, traces always hold the lab-frame autocorrelation
``A(t) = <psi(0)|psi(t)>``.

All steppers are fixed-step so a configuration fully determines the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from revival.errors import DomainError, IntegrationAccuracyError, WindowError
from revival.spectrum import SpectrumModel, energy

BARE = "bare"
ROTATING = "rotating"

EXP_MIDPOINT = "expmid"
RK4 = "rk4"

NORM_TOL = 1e-6
EDGE_POPULATION_TOL = 1e-10


class BoundaryPopulationError(IntegrationAccuracyError):
    """Population leaked onto a truncated edge of the level window."""


@dataclass
class WavePacketState:
    n_min: int
    n_max: int
    amps: np.ndarray
    t: float = 0.0

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float
    t_max: float
    frame: str = BARE
    rwa: bool = False
    sample_stride: int = 1
    integrator: str = EXP_MIDPOINT

    def __post_init__(self):
        if self.frame not in (BARE, ROTATING):
            raise DomainError(f"unknown frame {self.frame!r}")
        if self.integrator not in (EXP_MIDPOINT, RK4):
            raise DomainError(f"unknown integrator {self.integrator!r}")
        if not 0 < self.dt <= 2 * math.pi / 100 * (1 + 1e-12):
            raise DomainError("dt must be positive and at most 2*pi/100")
        if not self.t_max > 0:
            raise DomainError("t_max must be positive")
        if self.sample_stride < 1:
            raise DomainError("sample_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.t_max / self.dt - 1e-9))


@dataclass
class AutocorrTrace:
    times: np.ndarray
    values: np.ndarray
    norm_drift: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.norm_drift is None:
            self.norm_drift = np.zeros_like(self.times)

    @property
    def abs2(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def default_window(r: float, delta_n: float, N: int = 1) -> tuple[int, int]:
    c = int(round(r))
    pad = int(math.ceil(8 * delta_n)) + 2 * N
    return max(1, c - pad), c + pad


def init_gaussian(center: float, delta_n: float, n_min: int, n_max: int) -> WavePacketState:
    """Real Gaussian packet ``C_n ~ exp(-(n - center)^2 / (4 delta_n^2))``, normalized.

    The window must hold ``center +- 5 delta_n``; level 1 is a hard floor, not
    a truncation, so the lower side is only checked above it.
    """
    if not delta_n > 0:
        raise DomainError("delta_n must be positive")
    if n_min < 1 or n_max <= n_min:
        raise WindowError("need 1 <= n_min < n_max")
    if (n_min > 1 and n_min > center - 5 * delta_n) or n_max < center + 5 * delta_n:
        raise WindowError(
            f"window [{n_min}, {n_max}] does not contain {center} +- 5*{delta_n}"
        )
    n = np.arange(n_min, n_max + 1, dtype=float)
    amps = np.exp(-((n - center) ** 2) / (4.0 * delta_n**2))
    amps /= math.sqrt(float(np.sum(amps**2)))
    return WavePacketState(n_min, n_max, amps.astype(complex), 0.0)


def _frame_rates(model: SpectrumModel, r: float, N: int, levels: np.ndarray) -> np.ndarray:
    hbar = model.hbar_eff
    return (energy(model, r) + (levels - r) * hbar / N) / hbar


class Propagator:
    """Fixed-step stepper for one frame and coupling matrix.

    ``step(C, t, dt)`` advances the frame amplitudes from ``t`` to ``t + dt``;
    a negative ``dt`` runs the exponential midpoint step exactly backwards.
    """

    def __init__(self, model, W, r, N, lam, levels, frame=BARE):
        self.hbar = model.hbar_eff
        self.lam = lam
        self.frame = frame
        self.W = np.asarray(W, dtype=float)
        self.levels = np.asarray(levels)
        self.bare_rates = np.asarray(energy(model, self.levels.astype(float))) / self.hbar
        self.phi = _frame_rates(model, r, N, self.levels)
        if frame == ROTATING:
            self.diag_rates = self.bare_rates - self.phi
        else:
            self.diag_rates = self.bare_rates
        self.w_vals, self.w_vecs = np.linalg.eigh(self.W)

    def _frame_phase(self, t):
        return np.exp(1j * self.phi * t)

    def _couple_exp(self, C, t, s):
        # exp(-i s W) in the frame at time t
        if self.frame == ROTATING:
            f = self._frame_phase(t)
            C = np.conj(f) * C
        C = self.w_vecs @ (np.exp(-1j * s * self.w_vals) * (self.w_vecs.T @ C))
        if self.frame == ROTATING:
            C = f * C
        return C

    def step_expmid(self, C, t, dt):
        half = np.exp(-0.5j * self.diag_rates * dt)
        C = half * C
        tm = t + 0.5 * dt
        C = self._couple_exp(C, tm, self.lam * math.sin(tm) * dt / self.hbar)
        return half * C

    def rhs(self, t, C):
        drive = self.lam * math.sin(t) / self.hbar
        if self.frame == ROTATING:
            f = self._frame_phase(t)
            coupled = f * (self.W @ (np.conj(f) * C))
        else:
            coupled = self.W @ C
        return -1j * (self.diag_rates * C + drive * coupled)

    def step_rk4(self, C, t, dt):
        k1 = self.rhs(t, C)
        k2 = self.rhs(t + 0.5 * dt, C + 0.5 * dt * k1)
        k3 = self.rhs(t + 0.5 * dt, C + 0.5 * dt * k2)
        k4 = self.rhs(t + dt, C + dt * k3)
        return C + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

    def to_lab(self, C, t):
        if self.frame == ROTATING:
            return np.conj(self._frame_phase(t)) * C
        return C

    def from_lab(self, C, t):
        if self.frame == ROTATING:
            return self._frame_phase(t) * C
        return C


class RWAPropagator(Propagator):
    """Rotating-frame system keeping only the stationary ``m = n +- N`` couplings.

    The reduced Hamiltonian is time independent and splits into ``N`` blocks
    (levels grouped by residue mod ``N``), each diagonalized once.
    """

    def __init__(self, model, W, r, N, lam, levels):
        super().__init__(model, W, r, N, lam, levels, frame=ROTATING)
        size = len(self.levels)
        W = self.W
        H = np.diag(self.diag_rates.astype(complex))
        idx = np.arange(size - N)
        # stationary parts of sin(t) * exp(+-i t): +1/(2i) above, -1/(2i) below
        H[idx, idx + N] = lam * W[idx, idx + N] / (2j * self.hbar)
        H[idx + N, idx] = -lam * W[idx + N, idx] / (2j * self.hbar)
        self.H = H
        self.blocks = []
        for res in range(N):
            sel = np.arange(res, size, N)
            vals, vecs = np.linalg.eigh(H[np.ix_(sel, sel)])
            self.blocks.append((sel, vals, vecs))

    def step_expmid(self, C, t, dt):
        out = np.empty_like(C)
        for sel, vals, vecs in self.blocks:
            out[sel] = vecs @ (np.exp(-1j * vals * dt) * (vecs.conj().T @ C[sel]))
        return out

    def rhs(self, t, C):
        return -1j * (self.H @ C)


def _edge_levels(state: WavePacketState) -> list[int]:
    edges = [len(state.amps) - 1]
    if state.n_min > 1:
        edges.append(0)
    return edges


def evolve(
    state: WavePacketState,
    model: SpectrumModel,
    W: np.ndarray,
    params,
    config: EvolutionConfig,
    monitor_edges: bool = True,
) -> tuple[AutocorrTrace, WavePacketState]:
    """Integrate from ``state`` to ``state.t + config.t_max``.

    The norm is never renormalized; a drift above 1e-6 raises
    :class:`IntegrationAccuracyError`.  Population above 1e-10 on a truncated
    edge level raises :class:`BoundaryPopulationError`.
    """
    levels = state.levels
    if np.shape(W) != (len(levels), len(levels)):
        raise DomainError("coupling matrix does not match the level window")
    if config.rwa:
        prop = RWAPropagator(model, W, params.r, params.N, params.lam, levels)
    else:
        prop = Propagator(model, W, params.r, params.N, params.lam, levels, config.frame)
    stepper = prop.step_rk4 if config.integrator == RK4 else prop.step_expmid

    t0 = state.t
    psi0 = state.amps.astype(complex)
    C = prop.from_lab(psi0, t0)
    edges = _edge_levels(state) if monitor_edges else []
    if abs(state.norm() - 1.0) > 1e-12:
        raise DomainError("initial state must be normalized")
    times, values, drift = [t0], [1.0 + 0.0j], [abs(state.norm() - 1.0)]
    dt = config.dt
    for i in range(1, config.n_steps + 1):
        t_prev = t0 + (i - 1) * dt
        C = stepper(C, t_prev, dt)
        if i % config.sample_stride and i != config.n_steps:
            continue
        t = t0 + i * dt
        lab = prop.to_lab(C, t)
        pop = np.abs(lab) ** 2
        d = abs(float(pop.sum()) - 1.0)
        if d > NORM_TOL:
            raise IntegrationAccuracyError(
                f"norm drift {d:.2e} at t={t:.4g}; retry with dt <= {dt / 2:.4g}"
            )
        for e in edges:
            if pop[e] > EDGE_POPULATION_TOL:
                raise BoundaryPopulationError(
                    f"edge level {levels[e]} holds population {pop[e]:.2e} at t={t:.4g}; widen the window"
                )
        times.append(t)
        values.append(complex(np.vdot(psi0, lab)))
        drift.append(d)
    final = WavePacketState(state.n_min, state.n_max, prop.to_lab(C, t0 + config.n_steps * dt),
                            t0 + config.n_steps * dt)
    return AutocorrTrace(np.array(times), np.array(values), np.array(drift)), final


def evolve_rwa(state, model, W, params, config):
    """:func:`evolve` restricted to the rotating-wave system."""
    cfg = EvolutionConfig(
        dt=config.dt,
        t_max=config.t_max,
        frame=ROTATING,
        rwa=True,
        sample_stride=config.sample_stride,
        integrator=config.integrator,
    )
    return evolve(state, model, W, params, cfg)


def predicted_autocorrelation(xi, eps, times, hbar: float = 1.0) -> AutocorrTrace:
    """``A(t) = sum_n |xi_n|^2 exp(i eps_n t / hbar)`` by direct summation."""
    w = np.abs(np.asarray(xi)) ** 2
    eps = np.asarray(eps, dtype=float)
    if w.shape != eps.shape:
        raise DomainError("xi and eps must be aligned")
    times = np.asarray(times, dtype=float)
    values = np.exp(1j * np.outer(times, eps) / hbar) @ w
    return AutocorrTrace(times, values)
