"""Unperturbed spectra, their level-index derivatives, and coupling matrices.

Units are dimensionless with mass and box length set to one and a drive of
unit angular frequency; ``hbar_eff`` is the only scale knob.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from revival.errors import DomainError, NoResonance

BOX = "box"
POWER_LAW = "powerlaw"

CONSTANT_V = "constant"
BOX_POSITION = "box_position"


@dataclass(frozen=True)
class SpectrumModel:
    """Analytic level law ``E_n``.

    ``box`` gives ``E_n = pi^2 hbar^2 n^2 / 2``; ``powerlaw`` gives ``E_n = c n^k``.
    """

    kind: str = BOX
    hbar_eff: float = 1.0
    c: float = 1.0
    k: float = 2.0

    def __post_init__(self):
        if self.kind not in (BOX, POWER_LAW):
            raise DomainError(f"unknown spectrum kind {self.kind!r}")
        if not self.hbar_eff > 0:
            raise DomainError("hbar_eff must be positive")
        if self.kind == POWER_LAW and not (self.c > 0 and self.k > 0):
            raise DomainError("power law needs c > 0 and k > 0")


@dataclass(frozen=True)
class CouplingModel:
    """Matrix elements of the drive operator.

    ``constant`` puts ``V`` on the two diagonals ``m = n +- N``; ``box_position``
    uses ``V * <m|x|n>`` for the unit box.
    """

    mode: str = CONSTANT_V
    V: float = 1.0

    def __post_init__(self):
        if self.mode not in (CONSTANT_V, BOX_POSITION):
            raise DomainError(f"unknown coupling mode {self.mode!r}")


def _check_level(n):
    n = np.asarray(n, dtype=float)
    if np.any(n < 1):
        raise DomainError("level index must be >= 1")
    return n


def energy(model: SpectrumModel, n):
    """Energy of level ``n``; real ``n`` is accepted so derivatives can be probed."""
    n = _check_level(n)
    if model.kind == BOX:
        e = 0.5 * math.pi**2 * model.hbar_eff**2 * n**2
    else:
        e = model.c * n**model.k
    return float(e) if e.ndim == 0 else e


def energy_derivs(model: SpectrumModel, r: float, max_order: int = 3) -> tuple:
    """Analytic ``(E', E'', E''')`` at continuous level ``r``, truncated to ``max_order``."""
    if not 1 <= max_order <= 3:
        raise DomainError("max_order must be 1, 2 or 3")
    r = float(_check_level(r))
    if model.kind == BOX:
        s = math.pi**2 * model.hbar_eff**2
        d = (s * r, s, 0.0)
    else:
        c, k = model.c, model.k
        d = (
            c * k * r ** (k - 1),
            c * k * (k - 1) * r ** (k - 2),
            c * k * (k - 1) * (k - 2) * r ** (k - 3),
        )
    return d[:max_order]


def find_resonant_level(
    model: SpectrumModel, N: int, n_max_search: float = 1e7, rtol: float = 1e-12
) -> float:
    """Solve ``N E'(r) = hbar_eff`` for ``r >= 1`` by bisection."""
    if N < 1:
        raise DomainError("resonance order N must be a positive integer")

    def f(r):
        return N * energy_derivs(model, r, 1)[0] - model.hbar_eff

    lo, hi = 1.0, float(n_max_search)
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_lo * f_hi > 0:
        raise NoResonance(f"N E'(r) = hbar has no root in [1, {n_max_search:g}]")
    while hi - lo > rtol * lo:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def box_position_element(m: int, n: int) -> float:
    """``<m|x|n>`` for the unit box with ``psi_n = sqrt(2) sin(n pi x)``."""
    if m == n:
        return 0.5
    if (m + n) % 2 == 0:
        return 0.0
    return -8.0 * m * n / (math.pi**2 * (m * m - n * n) ** 2)


def coupling_matrix(coupling: CouplingModel, n_min: int, n_max: int, N: int = 1) -> np.ndarray:
    """Real-symmetric coupling matrix over levels ``n_min..n_max``.

    ``N`` is only used by the constant-V mode, which fills the ``+-N`` diagonals.
    """
    if not (1 <= n_min < n_max):
        raise DomainError("need 1 <= n_min < n_max")
    size = n_max - n_min + 1
    if coupling.mode == CONSTANT_V:
        w = np.zeros((size, size))
        idx = np.arange(size - N)
        w[idx, idx + N] = coupling.V
        w[idx + N, idx] = coupling.V
        return w
    levels = np.arange(n_min, n_max + 1)
    m, n = np.meshgrid(levels, levels, indexing="ij")
    with np.errstate(divide="ignore", invalid="ignore"):
        off = -8.0 * m * n / (math.pi**2 * (m * m - n * n) ** 2)
    w = np.where((m + n) % 2 == 1, off, 0.0)
    w[np.diag_indices(size)] = 0.5
    return coupling.V * w
