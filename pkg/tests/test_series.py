from fractions import Fraction

import pytest

from app.exceptions import DomainError, SingularReversion
from app.schemas.phase import PhasePoint
from app.services.series import LaurentPoly, TruncatedSeries, lagrange_coefficients

def exact_series(*coeffs):
    return TruncatedSeries([Fraction(c) for c in coeffs])

def test_revert_catalan_like():
    # t = s + s² inverts to the Catalan numbers with alternating signs
    reverted = exact_series(0, 1, 1, 0, 0, 0).revert()
    assert reverted.coeffs == [0, 1, -1, 2, -5, 14]

def test_revert_requires_linear_term():
    with pytest.raises(SingularReversion):
        exact_series(0, 0, 1).revert()
    with pytest.raises(SingularReversion):
        exact_series(1, 1, 1).revert()

def test_exp_inverts_log():
    s = exact_series(1, 1, 0, 0, 0, 0)
    assert s.log().exp().coeffs == s.coeffs

def test_log_requires_unit_constant():
    with pytest.raises(DomainError):
        exact_series(2, 1).log()

def test_compose_with_reversion_is_identity():
    f = exact_series(0, 2, 3, -1, 5)
    assert f.compose(f.revert()).coeffs == [0, 1, 0, 0, 0]

def test_inverse_and_division():
    s = exact_series(1, -1, 0, 0)
    assert s.inverse().coeffs == [1, 1, 1, 1]
    assert (s / s).coeffs == [1, 0, 0, 0]

def test_lagrange_matches_reversion():
    f = exact_series(0, 1, -2, 3, 7, -1, 4)
    assert lagrange_coefficients(f) == f.revert().coeffs[1:]

def test_laurent_poly_arithmetic():
    p = LaurentPoly({2: 1, -2: Fraction(1, 2)})
    q = LaurentPoly.monomial(0, 3)
    product = p * q
    assert product.coeff(2) == 3
    assert product.coeff(-2) == Fraction(3, 2)
    assert product.support() == [-2, 2]
    assert (p - p) == LaurentPoly()
    assert p.evaluate(2.0) == pytest.approx(4.125)

def test_first_sigma_coefficient_exact(series):
    # sigma_1 = 3 / (tau² - 1)
    s = series.sigma_series(Fraction(1, 2), Fraction(1), 4, exact=True)
    assert s[0] == 0
    assert s[1] == Fraction(-4)

def test_first_sigma_coefficient_float(series):
    tau = 0.3
    s = series.sigma_series(tau, 0.0, 4)
    assert s[1] == pytest.approx(3.0 / (tau * tau - 1.0), rel=1e-14)

def test_sigma_series_agrees_with_continuation(series, phase):
    s = series.sigma_series(0.3, 0.0, 24)
    solved = phase.solve_sigma(PhasePoint(tau=0.3, t=-0.005)).sigma
    assert s.evaluate(-0.005) == pytest.approx(solved, rel=1e-10)

@pytest.mark.parametrize("tau, h", [(0.3, 0.0), (0.5, 0.4), (0.15, -0.2)])
def test_reversion_and_lagrange_routes_agree(series, tau, h):
    report = series.lagrange_sigma_coeffs(tau, h, 16)
    assert report.max_relative_discrepancy < 1e-9
    assert report.by_reversion == pytest.approx(report.by_lagrange, rel=1e-9)

def test_extended_precision_routes_agree(series):
    report = series.lagrange_sigma_coeffs(0.4, 0.0, 30, extended=True)
    assert report.max_relative_discrepancy < 1e-25

def test_sigma_coefficients_reject_bad_tau(series):
    with pytest.raises(DomainError):
        series.lagrange_sigma_coeffs(1.5, 0.0, 4)

def test_taylor_coefficients_are_scaled_sigma_coefficients(series):
    taylor = series.taylor_sigma_coeffs(0.3, 0.0, 6)
    report = series.lagrange_sigma_coeffs(0.3, 0.0, 6)
    scaled = [float(c) * f for c, f in zip(taylor, (1, 2, 6, 24, 120, 720))]
    assert scaled == pytest.approx(report.by_reversion, rel=1e-12)
