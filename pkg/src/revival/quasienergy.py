"""Effective-Hamiltonian coefficients, quasi-energies and revival time scales.

Two evaluation modes are kept side by side:

``definition``
    Periods as quotients ``2 pi hbar / eps'``, ``4 pi hbar / eps''`` and
    ``12 pi hbar / eps'''`` where the derivatives are taken with respect to the
    level index ``n``.  The Mathieu exponent depends on the level through
    ``nu_n = 2 (n - r) / N`` so every derivative carries a factor ``(2/N)^j``.

``paper``
    The closed-form products ``T0 * [...]`` with ``T0 = 2 pi hbar / beta``,
    kept verbatim with their original coefficients.  They do not agree with
    ``definition``; the gap is reported rather than corrected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

from revival import mathieu
from revival.errors import DomainError, FlatSpectrum, SingularOrder
from revival.spectrum import SpectrumModel, energy_derivs

DEFINITION = "definition"
PAPER = "paper"

PAPERQ = "paperq"
STDQ = "stdq"

SERIES = "series"
MATRIX_FLOQUET = "matrix"

INF = math.inf


@dataclass(frozen=True)
class ResonanceParams:
    N: int
    r: float
    lam: float
    V: float
    hbar_eff: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise DomainError("N must be a positive integer")
        if not self.hbar_eff > 0:
            raise DomainError("hbar_eff must be positive")

    @property
    def strong_drive(self) -> bool:
        """True outside the small-modulation regime the series assumes."""
        return abs(self.lam) >= 0.5


@dataclass(frozen=True)
class CanonicalCoeffs:
    alpha_mag: float
    beta: float
    gamma_mag: float
    omega_sq: float
    q_paper: float
    q_std: float
    a_offset: float
    N: int = 1
    hbar_eff: float = 1.0

    def q(self, convention: str = PAPERQ) -> float:
        if convention == PAPERQ:
            return self.q_paper
        if convention == STDQ:
            return self.q_std
        raise DomainError(f"unknown q convention {convention!r}")


def canonical_coeffs(model: SpectrumModel, params: ResonanceParams) -> CanonicalCoeffs:
    """Coefficients of the third-order angle equation and its Mathieu reduction.

    ``alpha = i N^3 E'''/6``, ``beta = N^3 E''/4``, ``gamma = i (N E' - hbar)``
    are stored as the real factors multiplying ``i``; ``gamma_mag`` keeps its
    sign because it enters the shift linearly.  With ``omega = i gamma / (2 beta)`` real, the
    combination ``alpha omega^2 + gamma`` is purely imaginary, so the constant
    shift ``-(alpha omega^2 + gamma)^2 / (4 beta^2)`` is non-negative.
    """
    N = params.N
    e1, e2, e3 = energy_derivs(model, params.r, 3)
    beta = N**3 * e2 / 4.0
    if abs(beta) < 1e-300:
        raise FlatSpectrum("E'' vanishes at the resonant level; no Mathieu reduction")
    alpha_mag = N**3 * e3 / 6.0
    gamma_mag = N * e1 - params.hbar_eff
    omega_sq = gamma_mag**2 / (4.0 * beta**2)
    shift = alpha_mag * omega_sq + gamma_mag
    a_offset = shift**2 / (4.0 * beta**2)
    q_paper = params.lam * params.V / beta
    return CanonicalCoeffs(
        alpha_mag=alpha_mag,
        beta=beta,
        gamma_mag=gamma_mag,
        omega_sq=omega_sq,
        q_paper=q_paper,
        q_std=-0.5 * q_paper,
        a_offset=a_offset,
        N=N,
        hbar_eff=params.hbar_eff,
    )


def nu_of_n(n: float, params: ResonanceParams) -> float:
    """Mathieu exponent attached to level ``n``: ``2 (n - r) / N``."""
    return 2.0 * (n - params.r) / params.N


# strict=True applies the 1/4 from theta = 2z + pi/2 to the second derivative:
# a and q both pick up a factor 4 and eps = (beta/4) a + beta a_offset
def _jacobian(strict: bool) -> float:
    return 4.0 if strict else 1.0


def quasi_energy(
    nu: float,
    coeffs: CanonicalCoeffs,
    source: str = SERIES,
    convention: str = PAPERQ,
    strict: bool = False,
) -> float:
    """Quasi-energy ``beta * a_nu(q) + beta * a_offset``.

    ``source`` picks the series or the Hill-matrix characteristic value; the
    positive sign in front of ``beta a`` is the normative one.
    """
    j = _jacobian(strict)
    q = j * coeffs.q(convention)
    if source == SERIES:
        a = mathieu.char_value_series(nu, q)
    elif source == MATRIX_FLOQUET:
        a = mathieu.char_value_matrix(nu, q).a
    else:
        raise DomainError(f"unknown quasi-energy source {source!r}")
    return coeffs.beta * a / j + coeffs.beta * coeffs.a_offset


def eps_derivatives(
    nu_r: float, coeffs: CanonicalCoeffs, convention: str = PAPERQ, strict: bool = False
) -> tuple:
    """``(eps', eps'', eps''')`` with respect to the level index at ``nu_r``."""
    j = _jacobian(strict)
    q = j * coeffs.q(convention)
    dnu = 2.0 / coeffs.N
    return tuple(
        coeffs.beta / j * mathieu.da_dnu(nu_r, q, k) * dnu**k for k in (1, 2, 3)
    )


def _period(numerator: float, rate: float) -> float:
    return INF if rate == 0.0 else numerator / abs(rate)


def _sign(x: float) -> int:
    return int(x > 0) - int(x < 0)


@dataclass
class TimeScalesReport:
    mode: str
    T_cl: float
    T_rev: float
    T_sr: float
    nu_r: float
    q_used: float
    convention: str
    signs: dict = field(default_factory=dict)
    T_cl_lab: float | None = None
    strict: bool = False
    discrepancy: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def definition_times(
    nu_r: float, coeffs: CanonicalCoeffs, convention: str = PAPERQ, strict: bool = False
) -> TimeScalesReport:
    """Quotient-form periods from the level derivatives of the quasi-energy.

    ``T_cl_lab`` adds back the level spacing ``E'(r) = (gamma + hbar) / N``
    that the rotating frame removes (``hbar/N``) or folds into the constant
    offset (``gamma/N``); it is the classical period seen by a lab-frame
    autocorrelation.
    """
    if abs(nu_r * nu_r - 1.0) <= 1e-6:
        raise SingularOrder(
            "nu_r = +-1 is the resonant case; only the non-resonant situation is treated"
        )
    hbar = coeffs.hbar_eff
    d1, d2, d3 = eps_derivatives(nu_r, coeffs, convention, strict)
    lab_rate = (coeffs.gamma_mag + hbar) / coeffs.N + d1
    return TimeScalesReport(
        mode=DEFINITION,
        T_cl=_period(2 * math.pi * hbar, d1),
        T_rev=_period(4 * math.pi * hbar, d2),
        T_sr=_period(12 * math.pi * hbar, d3),
        nu_r=nu_r,
        q_used=_jacobian(strict) * coeffs.q(convention),
        convention=convention,
        signs={"T_cl": _sign(d1), "T_rev": _sign(d2), "T_sr": _sign(d3), "T_cl_lab": _sign(lab_rate)},
        T_cl_lab=_period(2 * math.pi * hbar, lab_rate),
        strict=strict,
    )


def paper_formula_terms(nu: float, q: float) -> dict:
    """Bracketed factors of the closed-form period formulas, term by term."""
    d = nu * nu - 1.0
    if abs(d) <= 1e-6:
        raise SingularOrder(
            "nu_r = +-1 is the resonant case; only the non-resonant situation is treated"
        )
    h = q * q / 2.0
    return {
        "T_cl": 2 * nu + h * (-2 * nu) / d**2,
        "T_rev": 2 * (2 + h * 2 * (3 * nu * nu - 1) / d**3),
        "T_sr": 6 * (h * 36 * nu * nu / d**4),
    }


def paper_times(
    nu_r: float, coeffs: CanonicalCoeffs, convention: str = PAPERQ
) -> TimeScalesReport:
    """Closed-form product periods ``T0 * [...]`` with ``T0 = 2 pi hbar / beta``."""
    q = coeffs.q(convention)
    T0 = 2 * math.pi * coeffs.hbar_eff / coeffs.beta
    terms = paper_formula_terms(nu_r, q)
    vals = {k: T0 * v for k, v in terms.items()}
    if q == 0.0:
        vals["T_sr"] = INF
    return TimeScalesReport(
        mode=PAPER,
        T_cl=abs(vals["T_cl"]),
        T_rev=abs(vals["T_rev"]),
        T_sr=abs(vals["T_sr"]),
        nu_r=nu_r,
        q_used=q,
        convention=convention,
        signs={k: _sign(v) for k, v in vals.items()},
    )


def relative_gap(a: float, b: float) -> float:
    """``|a - b| / |b|`` with infinities handled; nan when undefined."""
    if math.isinf(a) and math.isinf(b):
        return 0.0
    if math.isinf(a) or math.isinf(b):
        return INF
    if b == 0.0:
        return 0.0 if a == 0.0 else INF
    return abs(a - b) / abs(b)


def time_scales(
    model: SpectrumModel,
    params: ResonanceParams,
    mode: str = DEFINITION,
    convention: str = PAPERQ,
    center: float | None = None,
    strict: bool = False,
) -> list[TimeScalesReport]:
    """Time scales at the packet ``center`` (defaults to ``r``, i.e. ``nu_r = 0``).

    ``mode`` may be ``definition``, ``paper`` or ``both``; with ``both`` each
    report's ``discrepancy`` holds the relative gap of ``paper`` mode against ``definition`` mode.
    """
    if mode not in (DEFINITION, PAPER, "both"):
        raise DomainError(f"unknown mode {mode!r}")
    if params.lam < 0:
        raise DomainError("modulation strength must be >= 0")
    coeffs = canonical_coeffs(model, params)
    nu_r = nu_of_n(params.r if center is None else center, params)
    notes = []
    if params.strong_drive:
        notes.append("lambda >= 0.5: perturbative series outside its regime")
    if abs(coeffs.q(convention)) >= 1.0:
        notes.append("|q| >= 1: small-q Mathieu series outside its regime")
    out = []
    if mode in (DEFINITION, "both"):
        out.append(definition_times(nu_r, coeffs, convention, strict))
    if mode in (PAPER, "both"):
        out.append(paper_times(nu_r, coeffs, convention))
    if len(out) == 2:
        d, p = out
        gaps = {k: relative_gap(getattr(p, k), getattr(d, k)) for k in ("T_cl", "T_rev", "T_sr")}
        d.discrepancy = gaps
        p.discrepancy = gaps
    for rep in out:
        rep.warnings = list(notes)
    return out
