from fractions import Fraction

import pytest

from app.exceptions import BranchPointReached, ContinuationFailure, DomainError
from app.models.enums.methods import FreeEnergyMethod
from app.schemas.phase import PhasePoint
from app.services.free_energy import kazakov_coefficients

POINTS = [
    PhasePoint(tau=0.3, t=-0.02),
    PhasePoint(tau=0.1, t=-0.05),
    PhasePoint(tau=0.6, t=-0.01),
    PhasePoint(tau=0.3, t=-0.02, h=0.3),
]

@pytest.mark.parametrize("pp", POINTS)
def test_u_integral_and_lambda_integral_agree(free_energy, pp):
    u_form = free_energy.evaluate(pp, FreeEnergyMethod.U_INTEGRAL)
    lam_form = free_energy.evaluate(pp, FreeEnergyMethod.LAMBDA_INTEGRAL)
    assert u_form.value == pytest.approx(lam_form.value, abs=1e-9)
    assert u_form.sigma_used == pytest.approx(lam_form.sigma_used, rel=1e-9)

def test_free_energy_vanishes_at_t_zero(free_energy):
    result = free_energy.F_eval(PhasePoint(tau=0.4, t=0.0))
    assert result.value == 0.0
    assert result.sigma_used == 0.0

def test_free_energy_matches_series_at_small_t(free_energy):
    series = free_energy.F_series(0.3, 0.0, 20)
    direct = free_energy.F_eval(PhasePoint(tau=0.3, t=-0.005)).value
    assert series.evaluate(-0.005) == pytest.approx(direct, rel=1e-8)

def test_free_energy_near_multicritical_point(free_energy):
    result = free_energy.F_eval(PhasePoint(tau=0.25, t=-0.0694444))
    assert abs(result.sigma_used - 1.0) < 0.02

def test_free_energy_rejects_positive_t(free_energy):
    with pytest.raises(DomainError):
        free_energy.F_eval(PhasePoint(tau=0.3, t=0.01))

def test_free_energy_beyond_critical_value(free_energy):
    with pytest.raises(BranchPointReached):
        free_energy.F_eval(PhasePoint(tau=0.3, t=-0.2))
    with pytest.raises(ContinuationFailure):
        free_energy.F_lambda_form(PhasePoint(tau=0.3, t=-0.2))

def test_t_derivative_matches_finite_difference(free_energy):
    t, h = -0.02, 1e-5
    slope = free_energy.dF_dt(PhasePoint(tau=0.3, t=t))
    plus = free_energy.F_eval(PhasePoint(tau=0.3, t=t + h)).value
    minus = free_energy.F_eval(PhasePoint(tau=0.3, t=t - h)).value
    assert slope == pytest.approx((plus - minus) / (2 * h), rel=1e-5)

def test_one_matrix_free_energy_small_t(free_energy):
    assert free_energy.F_one_matrix(1e-6) == pytest.approx(-5e-7, rel=1e-4)
    assert free_energy.F_one_matrix(0.0) == 0.0
    with pytest.raises(DomainError):
        free_energy.F_one_matrix(-0.1)

def test_decoupling_limits(free_energy):
    checks = free_energy.decoupling_checks()
    assert {c.side for c in checks} == {"low", "high"}
    for check in checks:
        bound = 1e-5 if check.side == "low" else 1e-4
        assert check.difference < bound, check

@pytest.mark.parametrize("pp", POINTS)
def test_planar_relations_hold_on_branch(free_energy, pp):
    f = free_energy.f_of_lambda(1.0, pp)
    assert free_energy.lambda_of_f(f, pp) == pytest.approx(1.0, abs=1e-12)
    r1, r2 = free_energy.string_relations(f, pp)
    assert abs(r1) < 1e-14
    assert abs(r2) < 1e-14

def test_planar_lambda_expressions_at_zero_field(free_energy):
    pp = PhasePoint(tau=0.3, t=-0.02)
    f = free_energy.f_of_lambda(0.6, pp)
    planar = free_energy.planar_relations(f, pp)
    assert planar.lambda_c == pytest.approx(0.6, abs=1e-12)
    assert planar.lambda_d == pytest.approx(0.6, abs=1e-12)

def test_f_of_lambda_domain(free_energy):
    with pytest.raises(DomainError):
        free_energy.f_of_lambda(1.5, PhasePoint(tau=0.3, t=-0.02))

@pytest.mark.parametrize("tau, h", [(0.3, 0.0), (0.5, 0.4), (0.15, -0.2)])
def test_series_routes_agree_with_graph_expansion(free_energy, tau, h):
    report = free_energy.series_report(tau, h, 8)
    assert report.max_relative_discrepancy < 1e-9
    assert report.coefficients[0] == pytest.approx(0.0, abs=1e-15)
    assert report.coefficients[1:4] == pytest.approx(report.reference, rel=1e-9)

def test_exact_series_first_coefficient(free_energy):
    report = free_energy.series_report(0.5, 1, 4, exact=True)
    assert report.exact[1] == "-16/9"
    assert report.max_relative_discrepancy == 0.0

def test_graph_expansion_exact_scalars():
    first, second, third = kazakov_coefficients(Fraction(1, 2), Fraction(1))
    assert first == Fraction(-16, 9)
    assert isinstance(second, Fraction)
    assert isinstance(third, Fraction)
