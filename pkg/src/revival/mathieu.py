"""Mathieu characteristic values of fractional order.

Convention: ``y'' + (a - 2 q cos 2z) y = 0`` with Floquet exponent ``nu``.
Two independent routes are provided: the second-order series in ``q`` and the
eigenvalue of the truncated Hill matrix over exponents ``nu + 2k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from revival.errors import ConvergenceError, DegenerateOrder, DomainError, SingularOrder

SERIES = "series"
MATRIX = "matrix"

MAX_TRUNCATION = 512
CONVERGENCE_TOL = 1e-8


@dataclass(frozen=True)
class MathieuChar:
    nu: float
    q: float
    a: float
    method: str
    truncation: int = 0
    err_estimate: float = 0.0


def _hill_eigenvalue(nu: float, q: float, M: int) -> float:
    k = np.arange(-M, M + 1)
    diag = (nu + 2.0 * k) ** 2
    off = np.full(2 * M, float(q))
    w, v = eigh_tridiagonal(diag, off)
    # the branch continuously connected to nu^2 keeps most weight on k = 0
    return float(w[np.argmax(np.abs(v[M, :]))])


def char_value_matrix(nu: float, q: float, M: int = 32) -> MathieuChar:
    """Characteristic value from the Hill matrix truncated to ``k = -M..M``.

    ``err_estimate`` is the change against a solve at ``M // 2``.
    """
    if abs(nu - round(nu)) < 1e-6:
        raise DegenerateOrder(f"integer order nu={nu} is a band edge; not modeled")
    if M < 8:
        raise DomainError("truncation M must be >= 8")
    if q == 0.0:
        return MathieuChar(nu, q, nu * nu, MATRIX, M, 0.0)
    a = _hill_eigenvalue(nu, q, M)
    err = abs(a - _hill_eigenvalue(nu, q, M // 2))
    if err > CONVERGENCE_TOL and M >= MAX_TRUNCATION:
        raise ConvergenceError(f"Hill matrix not converged at M={M} (gap {err:.3g})")
    return MathieuChar(nu, q, a, MATRIX, M, err)


def char_value_series(nu: float, q: float) -> float:
    """``a = nu^2 + q^2 / (2 (nu^2 - 1))``, accurate to ``O(q^4)``."""
    d = nu * nu - 1.0
    if abs(d) <= 1e-6:
        raise SingularOrder("nu = +-1 is the resonant case; the series is singular there")
    return nu * nu + q * q / (2.0 * d)


def da_dnu(nu: float, q: float, order: int, method: str = SERIES) -> float:
    """``d^j a / d nu^j`` for ``j = order`` in 1..3.

    The series route differentiates the closed form exactly. The matrix route
    uses central differences of :func:`char_value_matrix` (step 1e-4 for the
    first two orders, 1e-3 for the third).
    """
    if order not in (1, 2, 3):
        raise DomainError("order must be 1, 2 or 3")
    if method == SERIES:
        d = nu * nu - 1.0
        if abs(d) <= 1e-6:
            raise SingularOrder("nu = +-1 is the resonant case; the series is singular there")
        q2 = q * q
        if order == 1:
            return 2.0 * nu - q2 * nu / d**2
        if order == 2:
            return 2.0 + q2 * (3.0 * nu * nu + 1.0) / d**3
        return -12.0 * q2 * nu * (nu * nu + 1.0) / d**4
    if method != MATRIX:
        raise DomainError(f"unknown method {method!r}")

    def f(x):
        return char_value_matrix(x, q).a

    if order == 1:
        h = 1e-4
        return (f(nu + h) - f(nu - h)) / (2 * h)
    if order == 2:
        h = 1e-4
        return (f(nu + h) - 2 * f(nu) + f(nu - h)) / h**2
    h = 1e-3
    return (f(nu + 2 * h) - 2 * f(nu + h) + 2 * f(nu - h) - f(nu - 2 * h)) / (2 * h**3)
