"""Oracle suite and discrepancy ledger.

Oracle rows pass or fail.  Finding rows record places where the closed-form
period expressions, coefficient conventions or signs disagree with a direct
derivation; they are expected, stable and never count as failures.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.integrate import quad

from revival import mathieu, quasienergy as qe
from revival.propagate import (
    EvolutionConfig,
    Propagator,
    evolve,
    init_gaussian,
    predicted_autocorrelation,
)
from revival.quasienergy import CanonicalCoeffs, ResonanceParams
from revival.spectrum import (
    CouplingModel,
    SpectrumModel,
    box_position_element,
    coupling_matrix,
    energy,
    energy_derivs,
    find_resonant_level,
)

ORACLE = "oracle"
FINDING = "finding"

LEDGER_HEADER = ["check", "kind", "value", "reference", "error", "tolerance", "status"]

# reference point for the findings table
REF_NU = 2.5
REF_Q = 0.1


@dataclass(frozen=True)
class Check:
    check: str
    kind: str
    value: float
    reference: float
    error: float
    tolerance: float | None = None

    @property
    def passed(self) -> bool:
        return self.kind == FINDING or (math.isfinite(self.error) and self.error <= self.tolerance)

    @property
    def status(self) -> str:
        if self.kind == FINDING:
            return "finding"
        return "pass" if self.passed else "fail"

    def row(self):
        return [self.check, self.kind, self.value, self.reference, self.error, self.tolerance, self.status]


def _rel(a, b):
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    return abs(a - b) / abs(b) if b != 0 else math.inf


def fd5(f, x, h, order):
    """Five-point central difference of order 1, 2 or 3."""
    fp2, fp1, fm1, fm2 = f(x + 2 * h), f(x + h), f(x - h), f(x - 2 * h)
    if order == 1:
        return (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h)
    if order == 2:
        return (-fp2 + 16 * fp1 - 30 * f(x) + 16 * fm1 - fm2) / (12 * h * h)
    return (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h**3)


def mp_central_diff(f, x, order, dps=50):
    """Central finite difference of ``f`` carried out in extended precision."""
    with mpmath.workdps(dps):
        return float(mpmath.diff(f, mpmath.mpf(x), order))


def quasi_energy_level_derivs(coeffs: CanonicalCoeffs, params: ResonanceParams, center: float, convention="paperq"):
    """Central differences of the series quasi-energy over the level index."""

    def eps(n):
        return qe.quasi_energy(qe.nu_of_n(n, params), coeffs, qe.SERIES, convention)

    return tuple(mp_central_diff(eps, center, k) for k in (1, 2, 3))


# ---------------------------------------------------------------- oracles


def _spectrum_checks():
    out = []
    box = SpectrumModel("box", 1.0)
    d = energy_derivs(box, 10.0)
    fd = [fd5(lambda x: energy(box, x), 10.0, 1e-3, k) for k in (1, 2)]
    err = max(_rel(d[0], fd[0]), _rel(d[1], fd[1]))
    out.append(Check("energy_derivs_box_fd", ORACLE, d[1], fd[1], err, 1e-6))
    e3 = fd5(lambda x: energy(box, x), 10.0, 1e-2, 3)
    out.append(Check("energy_third_derivative_box_zero", ORACLE, d[2], e3, abs(e3) / d[1], 1e-6))
    pl = SpectrumModel("powerlaw", 1.0, 1.0, 3.5)
    d = energy_derivs(pl, 10.0)
    fd = [fd5(lambda x: energy(pl, x), 10.0, 1e-3 if k < 3 else 1e-2, k) for k in (1, 2, 3)]
    err = max(_rel(a, b) for a, b in zip(d, fd))
    out.append(Check("energy_derivs_powerlaw_fd", ORACLE, d[2], fd[2], err, 1e-6))

    m = SpectrumModel("box", 0.01)
    r = find_resonant_level(m, 1)
    exact = 1.0 / (math.pi**2 * 0.01)
    out.append(Check("resonant_level_closed_form", ORACLE, r, exact, _rel(r, exact), 1e-10))

    worst = 0.0
    for i in range(1, 11):
        for j in range(1, 11):
            val, _ = quad(lambda x: 2 * math.sin(i * math.pi * x) * x * math.sin(j * math.pi * x), 0, 1,
                          epsabs=1e-13, epsrel=1e-13, limit=200)
            worst = max(worst, abs(val - box_position_element(i, j)))
    out.append(Check("box_position_quadrature", ORACLE, box_position_element(1, 2), -16 / (9 * math.pi**2),
                     worst, 1e-8))
    return out


def series_gap_slope(nu: float, qs=(0.05, 0.1, 0.2)) -> float:
    gaps = [abs(mathieu.char_value_matrix(nu, q).a - mathieu.char_value_series(nu, q)) for q in qs]
    return float(np.polyfit(np.log(qs), np.log(gaps), 1)[0])


def _mathieu_checks():
    out = []
    slopes = [series_gap_slope(nu) for nu in (1.7, 2.5, 3.3)]
    out.append(Check("mathieu_series_gap_slope_min", ORACLE, min(slopes), 3.5, max(0.0, 3.5 - min(slopes)), 0.0))
    # next term of the small-q expansion, known independently of both routes
    nu, q = 2.5, 0.1
    d = nu * nu - 1
    a4 = (5 * nu * nu + 7) * q**4 / (32 * d**3 * (nu * nu - 4))
    gap = mathieu.char_value_matrix(nu, q).a - mathieu.char_value_series(nu, q)
    out.append(Check("mathieu_quartic_term", ORACLE, gap, a4, abs(gap - a4), 1e-9))
    a_pos = mathieu.char_value_matrix(2.5, 0.2).a
    a_neg = mathieu.char_value_matrix(2.5, -0.2).a
    out.append(Check("mathieu_even_in_q", ORACLE, a_neg, a_pos, abs(a_pos - a_neg), 1e-12))
    err = 0.0
    for order in (1, 2, 3):
        exact = mathieu.da_dnu(2.5, 0.2, order)
        fd = mp_central_diff(lambda x: mathieu.char_value_series(x, mpmath.mpf("0.2")), 2.5, order)
        err = max(err, _rel(exact, fd))
    out.append(Check("series_derivatives_fd", ORACLE, mathieu.da_dnu(2.5, 0.2, 3), fd, err, 1e-8))
    s, m = mathieu.da_dnu(2.5, 0.2, 2), mathieu.da_dnu(2.5, 0.2, 2, mathieu.MATRIX)
    out.append(Check("second_derivative_series_vs_matrix", ORACLE, s, m, abs(s - m), 1e-3))
    return out


def _coeff_checks(coeffs_fn):
    out = []
    pl = SpectrumModel("powerlaw", 11.0, 1.0, 3.0)
    params = ResonanceParams(1, 2.0, 0.0, 0.0, 11.0)
    c = coeffs_fn(pl, params)
    e2 = fd5(lambda x: energy(pl, x), 2.0, 1e-3, 2)
    e3 = fd5(lambda x: energy(pl, x), 2.0, 1e-2, 3)
    out.append(Check("beta_from_spectrum_fd", ORACLE, c.beta, e2 / 4, _rel(c.beta, e2 / 4), 1e-6))
    out.append(Check("alpha_from_spectrum_fd", ORACLE, c.alpha_mag, e3 / 6, _rel(c.alpha_mag, e3 / 6), 1e-6))
    # (alpha w^2 + gamma)^2 / (4 beta^2) with w^2 = gamma^2 / (4 beta^2), by complex arithmetic
    alpha, gamma = 1j * e3 / 6, 1j * (fd5(lambda x: energy(pl, x), 2.0, 1e-3, 1) - 11.0)
    omega = 1j * gamma / (2 * (e2 / 4))
    offset = (-(alpha * omega**2 + gamma) ** 2 / (4 * (e2 / 4) ** 2)).real
    out.append(Check("mathieu_offset_complex_form", ORACLE, c.a_offset, offset, _rel(c.a_offset, offset), 1e-6))

    box = SpectrumModel("box", 0.01)
    p = ResonanceParams(1, 10.0, 0.0, 1.0, 0.01)
    c = coeffs_fn(box, p)
    e2 = fd5(lambda x: energy(box, x), 10.0, 1e-3, 2)
    center = 10.0 + 1.25  # nu_r = 2.5
    p = dataclasses.replace(p, lam=REF_Q * c.beta)
    c = coeffs_fn(box, p)
    closed = qe.eps_derivatives(qe.nu_of_n(center, p), c)
    fd = quasi_energy_level_derivs(c, p, center)
    err = max(_rel(a, b) for a, b in zip(closed, fd))
    out.append(Check("quasienergy_level_derivatives_fd", ORACLE, closed[2], fd[2], err, 1e-6))
    return out


def super_revival_slope(qs=None, nu_r: float = REF_NU) -> float:
    qs = np.geomspace(0.02, 0.2, 10) if qs is None else np.asarray(qs)
    base = CanonicalCoeffs(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1, 1.0)
    t_sr = [
        qe.definition_times(nu_r, dataclasses.replace(base, q_paper=q, q_std=-q / 2)).T_sr for q in qs
    ]
    return float(np.polyfit(np.log(qs), np.log(t_sr), 1)[0])


def _time_scale_checks():
    out = []
    slope = super_revival_slope()
    out.append(Check("super_revival_q_slope", ORACLE, slope, -2.0, abs(slope + 2.0), 0.1))
    c = CanonicalCoeffs(0.0, 3.0, 0.0, 0.0, 0.1, -0.05, 0.0, 1, 1.0)
    t_sr = qe.paper_times(2.0, c).T_sr
    literal = 6 * (2 * math.pi / 3) * (0.01 / 2) * 36 * 4 / 81
    out.append(Check("closed_form_super_revival_literal", ORACLE, t_sr, literal, _rel(t_sr, literal), 1e-12))
    return out


def _propagation_checks():
    out = []
    h = 0.01
    box = SpectrumModel("box", h)
    lo, hi = 1, 40
    st = init_gaussian(10, 2, lo, hi)
    W = coupling_matrix(CouplingModel("constant", 1.0), lo, hi, 1)
    p = ResonanceParams(1, find_resonant_level(box, 1), 0.05, 1.0, h)
    cfg = EvolutionConfig(2 * math.pi / 200, 10 * 2 * math.pi)
    a, _ = evolve(st, box, W, p, cfg, monitor_edges=False)
    b, _ = evolve(st, box, W, p, dataclasses.replace(cfg, frame="rotating"), monitor_edges=False)
    gap = float(np.max(np.abs(np.abs(a.values) - np.abs(b.values))))
    out.append(Check("frame_equivalence", ORACLE, gap, 0.0, gap, 1e-8))

    prop = Propagator(box, W, p.r, 1, p.lam, st.levels)
    C = st.amps.copy()
    dt = 2 * math.pi / 200
    drift = 0.0
    for i in range(10_000):
        C = prop.step_expmid(C, i * dt, dt)
        if i % 100 == 99:
            drift = max(drift, abs(float(np.vdot(C, C).real) - 1.0))
    out.append(Check("unitarity_expmid_1e4_steps", ORACLE, drift, 0.0, drift, 1e-8))
    for i in range(10_000, 0, -1):
        C = prop.step_expmid(C, i * dt, -dt)
    back = float(np.linalg.norm(C - st.amps))
    out.append(Check("time_reversal_expmid", ORACLE, back, 0.0, back, 1e-6))

    order = rk4_observed_order()
    out.append(Check("rk4_observed_order", ORACLE, order, 4.0, max(0.0, 3.7 - order), 0.0))

    free = dataclasses.replace(p, lam=0.0)
    tr, _ = evolve(st, box, W, free, EvolutionConfig(2 * math.pi / 100, 20.0))
    pred = predicted_autocorrelation(st.amps, -energy(box, st.levels.astype(float)), tr.times, h)
    gap = float(np.max(np.abs(tr.values - pred.values)))
    out.append(Check("free_trace_vs_phase_sum", ORACLE, gap, 0.0, gap, 1e-8))
    return out


def rk4_observed_order(dt: float = 2 * math.pi / 100, t_end: float = 4 * math.pi) -> float:
    """Order of RK4 from errors at ``dt`` and ``dt/2`` against a ``dt/8`` reference."""
    box = SpectrumModel("box", 0.01)
    lo, hi = 1, 24
    st = init_gaussian(10, 2, lo, hi)
    W = coupling_matrix(CouplingModel("constant", 1.0), lo, hi, 1)
    prop = Propagator(box, W, 10.0, 1, 0.01, st.levels, frame="rotating")

    def run(step):
        C = prop.from_lab(st.amps.copy(), 0.0)
        n = int(round(t_end / step))
        for i in range(n):
            C = prop.step_rk4(C, i * step, step)
        return C

    ref = run(dt / 8)
    e1 = np.linalg.norm(run(dt) - ref)
    e2 = np.linalg.norm(run(dt / 2) - ref)
    return float(math.log2(e1 / e2))


def oracle_checks(beta_scale: float = 1.0) -> list[Check]:
    """Every oracle.  ``beta_scale`` corrupts beta for mutation testing."""

    def coeffs_fn(model, params):
        c = qe.canonical_coeffs(model, params)
        if beta_scale != 1.0:
            c = dataclasses.replace(c, beta=c.beta * beta_scale)
        return c

    return (
        _spectrum_checks()
        + _mathieu_checks()
        + _coeff_checks(coeffs_fn)
        + _time_scale_checks()
        + _propagation_checks()
    )


# ---------------------------------------------------------------- findings


def _finding(name, value, reference):
    return Check(name, FINDING, value, reference, _rel(value, reference) if reference != 0 else abs(value))


def findings(nu: float = REF_NU, q: float = REF_Q) -> list[Check]:
    """Closed-form period expressions and conventions against direct derivation.

    Coefficients are compared inside the common ``(q^2/2) X / (nu^2 - 1)^k``
    form; the period rows use ``beta = hbar = N = 1``.
    """
    out = []
    d = nu * nu - 1
    out.append(_finding("first_derivative_coefficient", -2 * nu, -2 * nu))
    out.append(_finding("second_derivative_coefficient", 2 * (3 * nu * nu - 1), 2 * (3 * nu * nu + 1)))
    out.append(_finding("third_derivative_coefficient", 36 * nu * nu, -24 * nu * (nu * nu + 1)))

    terms = qe.paper_formula_terms(nu, q)
    series = [mathieu.da_dnu(nu, q, k) for k in (1, 2, 3)]
    # bracket of each closed form against the da/dnu it should hold
    out.append(_finding("classical_bracket_vs_da_dnu", terms["T_cl"], series[0]))
    out.append(_finding("revival_bracket_vs_d2a_dnu2", terms["T_rev"] / 2, series[1]))
    out.append(_finding("super_revival_bracket_vs_d3a_dnu3", terms["T_sr"] / 6, series[2]))

    unit = CanonicalCoeffs(0.0, 1.0, 0.0, 0.0, q, -q / 2, 0.0, 1, 1.0)
    d_rep = qe.definition_times(nu, unit)
    p_rep = qe.paper_times(nu, unit)
    for scale in ("T_cl", "T_rev", "T_sr"):
        out.append(_finding(f"period_{scale}_closed_form_vs_quotient", getattr(p_rep, scale), getattr(d_rep, scale)))
    out.append(_finding("period_T_sr_sign_quotient", float(d_rep.signs["T_sr"]), 1.0))

    for k in (1, 2, 3):
        out.append(_finding(f"level_jacobian_power_{k}", 1.0, (2.0 / 1) ** k))

    # second-order coefficient of the angle operator: N^2 E''/2 against N^3 E''/4
    for N in (1, 2, 3):
        out.append(_finding(f"angle_curvature_coefficient_N{N}", N**2 / 2, N**3 / 4))
    out.append(_finding("quasienergy_sign_of_a_beta", -1.0, 1.0))
    out.append(_finding("strict_jacobian_curvature_ratio", 0.25, 1.0))
    strict_q = qe.definition_times(nu, unit, strict=True).q_used
    out.append(_finding("strict_jacobian_q_ratio", strict_q / unit.q_paper, 1.0))

    # at q = 0 the quotient revival time against the bare spectrum's 4 pi hbar / E''
    free = qe.definition_times(nu, dataclasses.replace(unit, q_paper=0.0, q_std=0.0))
    e2 = 4.0 * unit.beta / unit.N**3
    out.append(_finding("free_revival_quotient_vs_spectrum", free.T_rev, 4 * math.pi * unit.hbar_eff / e2))

    # detuning of level r + N in the rotating frame: '+' written form against the derived '-'
    box = SpectrumModel("box", 0.01)
    r = find_resonant_level(box, 1)
    dE = energy(box, r + 1) - energy(box, r)
    out.append(_finding("rotating_frame_detuning_sign", dE + 0.01, dE - 0.01))
    out.append(_finding("quasienergy_q_convention_ratio", abs(unit.q_std / unit.q_paper), 1.0))
    del d
    return out


def run_selfcheck(beta_scale: float = 1.0) -> tuple[list[Check], bool]:
    rows = oracle_checks(beta_scale) + findings()
    ok = all(c.passed for c in rows)
    return rows, ok
