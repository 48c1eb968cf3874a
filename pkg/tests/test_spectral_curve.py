import math

import numpy as np
import pytest

from app.exceptions import AmbiguousSheet, BranchPointProximity, CertificateFailure, DomainError, PoleError
from app.models.enums.methods import MeasureKind
from app.schemas.phase import ABCPoint
from app.services.spectral_curve import OMEGA_PROBES, local_constants, polar_functions

P = ABCPoint(a=1.1, b=0.85, c=0.6)
LOW_SURFACE = ABCPoint(a=1 / 0.7, b=0.7, c=0.5)
HIGH_SURFACE = ABCPoint(a=1.0, b=0.7, c=0.5)
CORNER = ABCPoint(a=1.0, b=1.0, c=1.0)

@pytest.fixture
def cd(curve):
    return curve.curve_from_abc(P)

def test_branch_points_are_critical_values(cd):
    assert cd.dX(cd.abc.a) == pytest.approx(0.0, abs=1e-15)
    assert cd.dX(cd.abc.b) == pytest.approx(0.0, abs=1e-15)
    assert cd.X(cd.abc.a) == pytest.approx(cd.alpha, rel=1e-14)
    assert cd.X(cd.abc.b) == pytest.approx(cd.beta, rel=1e-14)
    assert 0 < cd.alpha < cd.beta
    assert cd.sigma == pytest.approx(P.sigma)

def test_curve_rejects_points_outside_region(curve):
    with pytest.raises(DomainError):
        curve.curve_from_abc(ABCPoint(a=1.1, b=0.5, c=0.7))

def test_stationarity_at_infinity(curve, cd):
    assert curve.stationarity_residual(cd, 1e4) < curve.stationarity_residual(cd, 1e3)
    assert curve.stationarity_residual(cd, 1e-4, side="Y") < curve.stationarity_residual(cd, 1e-3, side="Y")
    assert curve.stationarity_decay(cd) >= 1.9
    with pytest.raises(DomainError):
        curve.stationarity_residual(cd, 10.0, side="Z")

def test_polar_functions():
    r_plus, r_minus = polar_functions(0.0, 1.1, 0.85)
    assert r_plus == pytest.approx(1.1)
    assert r_minus == pytest.approx(0.85)
    _, r_minus = polar_functions(math.pi / 2, 1.1, 0.85)
    assert np.isnan(r_minus)

def test_local_constants_undefined_for_equal_parameters():
    assert local_constants(1.0, 1.0, 0.5) == (None, None)

def test_sheet_of_regions(curve, cd):
    assert curve.sheet_of(cd, 10.0) == 1
    assert curve.sheet_of(cd, 0.3) == 4
    assert curve.sheet_of(cd, -0.3) == 3
    assert curve.sheet_of(cd, 1.0j) == 2
    assert curve.sheet_of(cd, cd.abc.a) is None

@pytest.mark.parametrize("z", [0.3 + 2.0j, -1.5 - 0.7j, 12.0 + 0.5j])
def test_sheet_inversion(curve, cd, z):
    preimages = []
    for sheet in (1, 2, 3, 4):
        u = curve.invert_sheet(cd, z, sheet)
        assert abs(cd.X(u) - z) < 1e-10 * max(1.0, abs(z))
        assert curve.sheet_of(cd, u) == sheet
        preimages.append(u)
    assert len({round(u.real, 8) + 1j * round(u.imag, 8) for u in preimages}) == 4

@pytest.mark.parametrize("z", [0.3 + 2.0j, -1.5 - 0.7j, 12.0 + 0.5j])
def test_sheet_inversion_odd_symmetry(curve, cd, z):
    # X is odd in u: sheet 1 maps to itself, sheets 3 and 4 trade places
    assert curve.invert_sheet(cd, -z, 1) == pytest.approx(-curve.invert_sheet(cd, z, 1), abs=1e-10)
    assert curve.invert_sheet(cd, -z, 3) == pytest.approx(-curve.invert_sheet(cd, z, 4), abs=1e-10)
    assert curve.invert_sheet(cd, -z, 4) == pytest.approx(-curve.invert_sheet(cd, z, 3), abs=1e-10)

def test_sheet_inversion_on_cut_needs_side(curve, cd):
    z = 0.5 * cd.alpha
    with pytest.raises(AmbiguousSheet):
        curve.invert_sheet(cd, z, 1)
    above = curve.invert_sheet(cd, z, 1, side=1)
    below = curve.invert_sheet(cd, z, 1, side=-1)
    assert above == pytest.approx(below.conjugate(), abs=1e-6)

def test_sheet_inversion_at_branch_point(curve, cd):
    with pytest.raises((BranchPointProximity, AmbiguousSheet)):
        curve.invert_sheet(cd, cd.alpha, 1)

def test_sheet_number_validated(curve, cd):
    with pytest.raises(DomainError):
        curve.invert_sheet(cd, 1.0 + 1.0j, 5)

def test_derived_omega_differentiates_to_ydx(curve, cd):
    derived = curve.omega_coefficients(cd, "derived")
    for u in OMEGA_PROBES:
        assert curve.omega_derivative_residual(cd, u, derived) < 1e-8

def test_printed_omega_rejected_off_diagonal(curve, cd):
    printed = curve.omega_coefficients(cd, "printed")
    assert max(curve.omega_derivative_residual(cd, u, printed) for u in OMEGA_PROBES) > 1e-6
    chosen = curve.verify_omega(cd)
    assert chosen.source == "derived"
    assert chosen.residual < 1e-6

def test_omega_pole_and_source(curve, cd):
    with pytest.raises(PoleError):
        curve.omega_eval(cd, 0.0)
    with pytest.raises(DomainError):
        curve.omega_coefficients(cd, "guessed")

def test_omega_constants_reference_values(curve, cd):
    constants = curve.omega_constants(cd)
    assert constants.ell0 == pytest.approx(-1.74509, rel=1e-5)
    assert constants.ell1 == pytest.approx(-2.46248, rel=1e-5)
    assert constants.C1 == pytest.approx(-0.167748, rel=1e-5)
    assert constants.C2 == pytest.approx(0.364471, rel=1e-5)

def test_printed_omega_constants_relation(curve, cd):
    derived = curve.omega_constants(cd)
    printed = curve.omega_constants_printed(cd)
    assert printed.ell0 == pytest.approx(-derived.ell0, rel=1e-10)
    assert printed.ell1 == pytest.approx(derived.ell1, rel=1e-8)
    assert printed.C1 == pytest.approx(3 * derived.C1, rel=1e-8)
    assert printed.C2 == pytest.approx(6 * derived.C2, rel=1e-8)

@pytest.mark.slow
def test_extracted_omega_constants_match_closed_form(curve, cd):
    derived = curve.omega_constants(cd)
    extracted = curve.extract_omega_constants(cd)
    assert extracted.source == "extracted"
    assert extracted.ell0 == pytest.approx(derived.ell0, rel=1e-6)
    assert extracted.ell1 == pytest.approx(derived.ell1, rel=1e-6)
    assert extracted.C1 == pytest.approx(derived.C1, rel=1e-6)
    assert extracted.C2 == pytest.approx(derived.C2, rel=1e-6)

def test_sextic_reference_values(curve, cd):
    co = curve.sextic_coefficients(cd)
    assert co.source == "closed-form"
    assert co.s2q == pytest.approx(-3.86381, rel=1e-5)
    assert co.s2qi == pytest.approx(-3.66991, rel=1e-5)
    assert co.s1 == pytest.approx(20.0765, rel=1e-5)
    assert co.s0 == pytest.approx(-36.1244, rel=1e-5)

def test_sextic_fit_agrees_with_closed_form(curve, cd):
    closed = curve.sextic_coefficients(cd)
    fit = curve.sextic_fit(cd)
    assert (fit.s2q, fit.s2qi, fit.s1, fit.s0) == pytest.approx((closed.s2q, closed.s2qi, closed.s1, closed.s0), rel=1e-6)

@pytest.mark.parametrize("u", [0.7 + 0.2j, 1.3 - 0.8j, -0.9 + 1.1j, 2.0])
def test_sextic_vanishes_on_curve(curve, cd, u):
    assert curve.sextic_residual(cd, u) < 1e-8

def test_sextic_uses_fit_at_sigma_one(curve):
    corner = curve.curve_from_abc(CORNER)
    co = curve.sextic_coefficients(corner)
    assert co.source == "fit"
    assert curve.sextic_residual(corner, 0.8 + 0.5j, co) < 1e-6

def test_measure_densities_nonnegative(curve, cd):
    for which in (MeasureKind.MU, MeasureKind.NU):
        table = curve.measure_table(cd, which, n=32)
        assert len(table) == 32
        assert all(sample.density >= 0 for sample in table)
        assert [sample.s for sample in table] == sorted(sample.s for sample in table)

def test_measure_density_theta_ranges(curve, cd):
    with pytest.raises(DomainError):
        curve.measure_density(cd, MeasureKind.MU, 0.0)
    with pytest.raises(DomainError):
        curve.measure_density(cd, MeasureKind.NU, math.pi / 2)
    up = curve.measure_density(cd, MeasureKind.MU, 1.0)
    down = curve.measure_density(cd, MeasureKind.MU, -1.0)
    assert up.density == pytest.approx(down.density)

@pytest.mark.slow
def test_mu_is_a_probability_measure(curve, cd):
    assert curve.mu_mass(cd) == pytest.approx(1.0, abs=1e-6)

@pytest.mark.slow
def test_endpoint_exponents_interior(curve, cd):
    assert curve.endpoint_exponent(cd, MeasureKind.MU).exponent == pytest.approx(0.5, abs=0.05)
    assert curve.endpoint_exponent(cd, MeasureKind.NU).exponent == pytest.approx(0.5, abs=0.05)

@pytest.mark.slow
def test_endpoint_exponents_low_temperature_surface(curve):
    cd = curve.curve_from_abc(LOW_SURFACE)
    assert curve.endpoint_exponent(cd, MeasureKind.NU).exponent == pytest.approx(1.5, abs=0.05)
    assert curve.endpoint_exponent(cd, MeasureKind.MU).exponent == pytest.approx(0.5, abs=0.05)

@pytest.mark.slow
def test_endpoint_exponents_high_temperature_surface(curve):
    cd = curve.curve_from_abc(HIGH_SURFACE)
    assert curve.endpoint_exponent(cd, MeasureKind.MU).exponent == pytest.approx(1.5, abs=0.05)
    assert curve.endpoint_exponent(cd, MeasureKind.NU).exponent == pytest.approx(0.5, abs=0.05)

@pytest.mark.slow
def test_endpoint_exponents_multicritical(curve):
    cd = curve.curve_from_abc(CORNER)
    assert curve.endpoint_exponent(cd, MeasureKind.MU).exponent == pytest.approx(4 / 3, abs=0.05)
    assert curve.endpoint_exponent(cd, MeasureKind.NU).exponent == pytest.approx(4 / 3, abs=0.05)

def test_lensing_certificate_interior(curve):
    certificate = curve.check_lensing(P)
    assert certificate.passed
    assert min(certificate.margins.values()) >= -1e-12
    assert certificate.q1 > 0
    assert certificate.q1_tilde > 0

def test_lensing_certificate_failure_carries_witness(curve):
    # strict mode off lets a point with c > b through to the inequalities
    curve.phase.strict = False
    with pytest.raises(CertificateFailure) as excinfo:
        curve.check_lensing(ABCPoint(a=1.1, b=0.6, c=0.85))
    assert excinfo.value.witness["inequality"] == "r_plus_monotone"
