import math

import pytest

from app.exceptions import DomainError, GuardBand, InsufficientWindow, RangeError
from app.models.enums.phase import Regime
from app.services.phase_space import g_prime

def test_saddle_points_are_critical(asymptotics):
    tau = 0.4
    for z in asymptotics.saddle_points(tau)[:2]:
        assert g_prime(z.real, tau, 1.0) == pytest.approx(0.0, abs=1e-14)

def test_dominant_saddle_switches_at_quarter(asymptotics):
    assert asymptotics.dominant_saddle(0.1) == 1.0
    assert asymptotics.dominant_saddle(0.5) == pytest.approx(math.sqrt(2) - 1)

@pytest.mark.parametrize(
    "tau, regime",
    [(0.1, Regime.LOW_TEMP), (0.5, Regime.HIGH_TEMP), (0.24, Regime.AIRY_UNIFORM), (0.26, Regime.AIRY_UNIFORM)],
)
def test_regime(asymptotics, tau, regime):
    assert asymptotics.regime(tau) == regime

def test_contour_coefficients_match_sigma_coefficients(asymptotics):
    contour = asymptotics.contour_coefficients(0.3, 10)
    exact = asymptotics.exact_sigma_coeffs(0.3, order=10)
    assert exact.max_relative_discrepancy < 1e-20
    for V, (value, sigma_v) in enumerate(zip(contour, exact.by_reversion), start=1):
        assert float(value) == pytest.approx(sigma_v / math.factorial(V - 1), rel=1e-12)

@pytest.mark.slow
@pytest.mark.parametrize("tau", [0.1, 0.5])
def test_saddle_form_with_corrections(asymptotics, tau):
    estimate = asymptotics.sigma_coeff_asymptotic(tau, 40, corrections=2)
    assert estimate.ratio == pytest.approx(1.0, abs=0.02)

@pytest.mark.slow
def test_corrections_improve_leading_form(asymptotics):
    bare = asymptotics.sigma_coeff_asymptotic(0.1, 30)
    corrected = asymptotics.sigma_coeff_asymptotic(0.1, 30, corrections=2)
    assert abs(corrected.ratio - 1.0) < abs(bare.ratio - 1.0)

def test_saddle_form_sign_alternates(asymptotics):
    assert asymptotics.saddle_form(0.1, 10) > 0
    assert asymptotics.saddle_form(0.1, 11) < 0

def test_saddle_form_refuses_guard_band(asymptotics):
    with pytest.raises(GuardBand):
        asymptotics.saddle_form(0.255, 20)
    with pytest.raises(DomainError):
        asymptotics.saddle_form(0.1, 20, corrections=3)

@pytest.mark.slow
def test_airy_form_near_quarter(asymptotics):
    estimate = asymptotics.sigma_coeff_airy(0.22, 60)
    assert estimate.regime == Regime.AIRY_UNIFORM
    assert estimate.ratio == pytest.approx(1.0, abs=0.05)

def test_airy_coefficients_regular_at_quarter(asymptotics):
    coeffs = asymptotics.airy_coefficients(0.25)
    assert coeffs.s == pytest.approx(0.0, abs=1e-12)
    assert coeffs.C == pytest.approx(-math.log(5.0 / 72.0))
    assert coeffs.a0 > 0
    left, right = asymptotics.airy_coefficients(0.25 - 1e-7), asymptotics.airy_coefficients(0.25 + 1e-7)
    assert left.a0 == pytest.approx(right.a0, rel=1e-5)
    assert left.b0 == pytest.approx(right.b0, rel=1e-5)

def test_airy_form_outside_band(asymptotics):
    with pytest.raises(DomainError):
        asymptotics.airy_form(0.4, 20)

def test_airy_function_range(asymptotics):
    assert asymptotics.airy_ai(0.0) == pytest.approx(0.355028053887817)
    with pytest.raises(RangeError):
        asymptotics.airy_ai(25.0)
    with pytest.raises(RangeError):
        asymptotics.airy_bi_prime(-20.0)

def test_ratio_estimate_extrapolation(asymptotics):
    estimate = asymptotics.ratio_estimate(0.1, 40)
    assert estimate.t_critical == pytest.approx(-1 / 12 + (2 / 9) * 0.01)
    assert estimate.relative_error < 0.01
    assert abs(estimate.raw / estimate.t_critical - 1) > estimate.relative_error

def test_ratio_estimate_needs_window(asymptotics):
    with pytest.raises(InsufficientWindow):
        asymptotics.ratio_estimate(0.3, 2)
