import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from revival import mathieu
from revival.errors import DegenerateOrder, DomainError, SingularOrder
from revival.selfcheck import mp_central_diff, series_gap_slope

NON_INTEGER_NU = st.floats(0.05, 6.0).filter(lambda v: abs(v - round(v)) > 0.05)


def test_matrix_at_zero_q_is_exact():
    res = mathieu.char_value_matrix(2.5, 0.0)
    assert res.a == 6.25
    assert res.err_estimate == 0.0
    assert res.method == "matrix"


def test_matrix_close_to_series_at_small_q():
    a = mathieu.char_value_matrix(2.5, 0.2).a
    assert abs(a - (6.25 + 0.02 / 5.25)) < 1e-4
    assert a == pytest.approx(6.25381, abs=1e-5)


def test_integer_order_is_rejected():
    with pytest.raises(DegenerateOrder):
        mathieu.char_value_matrix(3.0, 0.1)


def test_truncation_too_small():
    with pytest.raises(DomainError):
        mathieu.char_value_matrix(2.5, 0.1, M=4)


def test_series_examples():
    assert mathieu.char_value_series(2.0, 0.0) == 4.0
    assert mathieu.char_value_series(2.0, 0.1) == pytest.approx(4 + 0.005 / 3, rel=1e-15)
    with pytest.raises(SingularOrder):
        mathieu.char_value_series(1 + 1e-9, 0.1)
    with pytest.raises(SingularOrder):
        mathieu.char_value_series(-1.0, 0.1)


def test_gap_slope_at_least_three_and_a_half():
    for nu in (1.7, 2.5, 3.3):
        assert series_gap_slope(nu) >= 3.5


def test_gap_has_the_known_quartic_coefficient():
    # a = nu^2 + q^2/(2(nu^2-1)) + (5nu^2+7) q^4 / (32 (nu^2-1)^3 (nu^2-4)) + O(q^6)
    for nu in (1.7, 2.5, 3.3):
        d = nu * nu - 1
        for q in (0.02, 0.05):
            gap = mathieu.char_value_matrix(nu, q).a - mathieu.char_value_series(nu, q)
            c4 = (5 * nu * nu + 7) / (32 * d**3 * (nu * nu - 4))
            assert gap == pytest.approx(c4 * q**4, rel=0.05)


def test_single_fitted_constant_bounds_gap():
    qs = np.array([0.05, 0.1, 0.2])
    for nu in (1.7, 2.5, 3.3):
        gaps = np.array([abs(mathieu.char_value_matrix(nu, q).a - mathieu.char_value_series(nu, q)) for q in qs])
        C = np.max(gaps / qs**4)
        assert np.all(gaps <= C * qs**4 * (1 + 1e-12))
        assert np.ptp(gaps / qs**4) < 0.5 * C


@pytest.mark.parametrize("nu", [0.3, 1.7, 2.5, 4.4])
def test_matrix_error_estimate_shrinks(nu):
    res = [mathieu.char_value_matrix(nu, 6.0, M) for M in (8, 16, 32, 64)]
    floor = 1e-13 * abs(res[-1].a)
    errs = [r.err_estimate for r in res]
    assert errs[0] > floor
    assert all(b <= a + floor for a, b in zip(errs, errs[1:]))


@settings(max_examples=30)
@given(NON_INTEGER_NU, st.floats(0.0, 3.0))
def test_matrix_even_in_q(nu, q):
    a_pos = mathieu.char_value_matrix(nu, q).a
    a_neg = mathieu.char_value_matrix(nu, -q).a
    assert abs(a_pos - a_neg) <= 1e-12 * max(1.0, abs(a_pos))


def test_derivative_examples():
    assert mathieu.da_dnu(2.5, 0.0, 1) == 5.0
    assert mathieu.da_dnu(2.5, 0.0, 3) == 0.0
    s = mathieu.da_dnu(2.5, 0.2, 2)
    m = mathieu.da_dnu(2.5, 0.2, 2, method="matrix")
    assert abs(s - m) < 1e-3


@pytest.mark.parametrize("nu, q", [(2.5, 0.2), (1.7, 0.05), (3.3, 0.1), (0.4, 0.3)])
@pytest.mark.parametrize("order", [1, 2, 3])
def test_series_derivatives_match_finite_differences(nu, q, order):
    exact = mathieu.da_dnu(nu, q, order)
    fd = mp_central_diff(lambda x: mathieu.char_value_series(x, mpmath.mpf(q)), nu, order)
    assert exact == pytest.approx(fd, rel=1e-8)


def test_matrix_derivatives_track_series_at_small_q():
    for order in (1, 2, 3):
        s = mathieu.da_dnu(2.5, 0.05, order)
        m = mathieu.da_dnu(2.5, 0.05, order, method="matrix")
        assert abs(s - m) < 1e-4


def test_derivative_order_out_of_range():
    with pytest.raises(DomainError):
        mathieu.da_dnu(2.5, 0.1, 4)
