import math

import numpy as np
import pytest

from app.exceptions import BranchPointReached, DomainError, PoleError
from app.models.enums.phase import RegionLabel
from app.schemas.phase import ABCPoint, PhasePoint
from app.services.checks import sample_interior
from app.services.phase_space import MULTICRITICAL

INTERIOR = [
    ABCPoint(a=1.1, b=0.85, c=0.6),
    ABCPoint(a=1.0184, b=0.91, c=0.91),
    ABCPoint(a=1.3, b=0.7, c=0.2),
]

def test_map_abc_sends_corner_to_multicritical_point(phase):
    pp = phase.map_abc(ABCPoint(a=1.0, b=1.0, c=1.0))
    assert pp.tau == pytest.approx(0.25, abs=1e-15)
    assert pp.t == pytest.approx(-5.0 / 72.0, abs=1e-15)
    assert pp.h == pytest.approx(0.0, abs=1e-15)

def test_map_abc_rejects_points_outside_region(phase):
    with pytest.raises(DomainError):
        phase.map_abc(ABCPoint(a=0.9, b=0.5, c=0.3))

def test_critical_values_meet_at_quarter(phase):
    assert phase.t_low(0.25) == pytest.approx(-5.0 / 72.0, abs=1e-15)
    assert phase.t_high(0.25) == pytest.approx(-5.0 / 72.0, abs=1e-15)

@pytest.mark.parametrize("p", INTERIOR)
def test_sigma_continuation_recovers_a2bc(phase, p):
    solution = phase.solve_sigma(phase.map_abc(p))
    assert solution.converged
    assert not solution.hit_branch_point
    assert solution.sigma == pytest.approx(p.sigma, rel=1e-10)

@pytest.mark.parametrize("p", INTERIOR)
def test_jacobian_closed_form_matches_finite_difference(phase, p):
    exact = phase.jacobian_abc(p)
    assert phase.jacobian_finite_difference(p) == pytest.approx(exact, rel=1e-6)

def test_sigma_at_t_zero_is_zero(phase):
    solution = phase.solve_sigma(PhasePoint(tau=0.4, t=0.0))
    assert solution.sigma == 0.0
    assert solution.steps == 0

def test_sigma_on_fold_reports_branch_point(phase):
    solution = phase.solve_sigma(PhasePoint(tau=0.25, t=-5.0 / 72.0))
    assert solution.hit_branch_point
    assert solution.sigma == pytest.approx(1.0, abs=1e-12)

def test_sigma_near_multicritical_point(phase):
    # cubic fold: sigma - 1 scales like the cube root of the distance to t_cr
    solution = phase.solve_sigma(PhasePoint(tau=0.25, t=-5.0 / 72.0 + 2e-14))
    assert abs(solution.sigma - 1.0) < 1e-4
    assert solution.sigma < 1.0

def test_sigma_beyond_critical_value_raises(phase):
    with pytest.raises(BranchPointReached) as excinfo:
        phase.solve_sigma(PhasePoint(tau=0.3, t=-0.2))
    assert excinfo.value.t_critical == pytest.approx(phase.t_critical(0.3, 0.0))
    assert excinfo.value.exit_code == 2

def test_sigma_rejects_tau_outside_unit_interval(phase):
    with pytest.raises(DomainError):
        phase.solve_sigma(PhasePoint(tau=1.2, t=-0.01))

def test_lambda_equals_one_at_sigma(phase):
    pp = phase.map_abc(INTERIOR[0])
    sigma = phase.solve_sigma(pp).sigma
    assert phase.lambda_eval(sigma, pp) == pytest.approx(1.0, abs=1e-12)
    assert abs(phase.I_eval(sigma, pp)) < 1e-12

def test_sigma_equation_pole_guard(phase):
    with pytest.raises(PoleError):
        phase.I_eval(-1.0, PhasePoint(tau=0.3, t=-0.02))
    with pytest.raises(PoleError):
        phase.I_eval(1.0, PhasePoint(tau=0.3, t=-0.02, h=0.4))

def test_lambda_undefined_at_t_zero(phase):
    with pytest.raises(DomainError):
        phase.lambda_eval(0.3, PhasePoint(tau=0.3, t=0.0))

@pytest.mark.parametrize(
    "pp, label",
    [
        (PhasePoint(tau=0.3, t=0.1), RegionLabel.OUTSIDE),
        (PhasePoint(tau=0.5, t=-1.0), RegionLabel.OUTSIDE),
        (PhasePoint(tau=0.3, t=-0.02), RegionLabel.GENUS_ZERO_INTERIOR),
        (PhasePoint(tau=0.3, t=0.0), RegionLabel.BOUNDARY_T0),
        (PhasePoint(tau=0.0, t=-0.02), RegionLabel.BOUNDARY_TAU0),
        (PhasePoint(tau=1.0, t=-0.02), RegionLabel.BOUNDARY_TAU1),
        (PhasePoint(tau=0.3, t=-0.02, h=math.inf), RegionLabel.BOUNDARY_Q_WALL),
        (PhasePoint(tau=MULTICRITICAL[0], t=MULTICRITICAL[1]), RegionLabel.MULTICRITICAL),
    ],
)
def test_classify(phase, pp, label):
    assert phase.classify(pp).label == label

def test_classify_zero_field_surfaces(phase):
    low = phase.classify(PhasePoint(tau=0.2, t=phase.t_low(0.2)))
    high = phase.classify(PhasePoint(tau=0.5, t=phase.t_high(0.5)))
    assert low.label == RegionLabel.LOW_TEMP_SURFACE
    assert high.label == RegionLabel.HIGH_TEMP_SURFACE
    assert high.t_critical == pytest.approx(phase.t_high(0.5), rel=1e-12)

def test_classify_folds_negative_field(phase):
    up = phase.classify(PhasePoint(tau=0.3, t=-0.02, h=0.5))
    down = phase.classify(PhasePoint(tau=0.3, t=-0.02, h=-0.5))
    assert up.label == down.label
    assert down.point.h == -0.5

@pytest.mark.parametrize("b, c", [(0.7, 0.5), (0.9, 0.3), (0.5, 0.5)])
def test_critical_surfaces_are_images_of_region_faces(phase, b, c):
    low = phase.critical_surface_low(b, c)
    mapped = phase.map_abc(ABCPoint(a=1.0 / b, b=b, c=c))
    assert (low.tau, low.t, low.h) == pytest.approx((mapped.tau, mapped.t, mapped.h), rel=1e-12, abs=1e-14)

    high = phase.critical_surface_high(b, c)
    mapped = phase.map_abc(ABCPoint(a=1.0, b=b, c=c))
    assert (high.tau, high.t, high.h) == pytest.approx((mapped.tau, mapped.t, mapped.h), rel=1e-12, abs=1e-14)

def test_gamma_b_is_image_of_edge(phase):
    gamma = phase.critical_curve_b(0.6)
    mapped = phase.map_abc(ABCPoint(a=1.0, b=1.0, c=0.6))
    assert (gamma.tau, gamma.t, gamma.h) == pytest.approx((mapped.tau, mapped.t, mapped.h), rel=1e-12, abs=1e-14)

@pytest.mark.parametrize("b, c", [(0.7, 0.5), (0.9, 0.3), (0.4, 0.1)])
def test_discriminant_vanishes_on_critical_surfaces(phase, b, c):
    for pp in (phase.critical_surface_low(b, c), phase.critical_surface_high(b, c)):
        assert phase.discriminant_scaled(pp.tau, pp.t, pp.cosh_h) < 1e-8

def test_discriminant_nonzero_inside(phase):
    assert phase.discriminant_scaled(0.3, -0.02, 1.0) > 1e-12

@pytest.mark.parametrize("c", [0.2, 0.6, 0.95])
def test_discriminant_vanishes_on_gamma_b(phase, c):
    pp = phase.critical_curve_b(c)
    assert phase.discriminant_scaled(pp.tau, pp.t, pp.cosh_h) < 1e-8

@pytest.mark.parametrize("tau", [0.3, 0.5085, 0.55])
def test_discriminant_vanishes_at_zero_field_t_low_inside_region(phase, tau):
    # σ = 1 stays a critical point of 𝔍 above τ = 1/4, with critical value t_low
    t = phase.t_low(tau)
    assert phase.classify(PhasePoint(tau=tau, t=t)).label == RegionLabel.GENUS_ZERO_INTERIOR
    assert any(abs(v - t) < 1e-15 for v in phase.real_critical_values(tau, 0.0))
    assert phase.discriminant_scaled(tau, t, 1.0) < 1e-8

def test_critical_values_contain_fold(phase):
    # t_cr is a real critical value, so 𝓙 vanishes on the critical surfaces
    for tau, h in [(0.2, 0.0), (0.5, 0.0), (0.3, 0.4)]:
        t_cr = phase.t_critical(tau, h)
        assert min(abs(v - t_cr) for v in phase.real_critical_values(tau, h)) < 1e-10

def test_discriminant_nonzero_on_interior_samples_off_critical_values(phase, rng):
    # complex critical values count: near H = 0 and τ > 1/4 the four points split from σ = 1
    # are complex, and 𝓙 is small close to t_low without vanishing
    kept = 0
    for p in sample_interior(rng, 100):
        pp = phase.map_abc(p)
        gap = min(abs(pp.t - v) for v in phase.critical_values(pp.tau, pp.h))
        if gap < 0.02 * abs(pp.t):
            continue
        kept += 1
        assert phase.discriminant_scaled(pp.tau, pp.t, pp.cosh_h) > 1e-4, (p, pp)
    assert kept >= 50

def test_t_critical_closed_form_matches_double_root_solver(phase):
    for tau in np.arange(0.05, 0.951, 0.05):
        tau = float(round(tau, 2))
        assert phase.t_critical(tau, 0.0) == pytest.approx(phase.t_critical_numeric(tau, 0.0), abs=1e-8)

def test_surface_parameters_validated(phase):
    with pytest.raises(DomainError):
        phase.critical_surface_low(0.5, 0.7)
    with pytest.raises(DomainError):
        phase.critical_curve_b(1.5)

def test_invert_phase_point_round_trip(phase):
    p = INTERIOR[2]
    pp = phase.map_abc(p)
    assert pp.q < 1.0
    back = phase.invert_phase_point(pp)
    assert (back.a, back.b, back.c) == pytest.approx((p.a, p.b, p.c), rel=1e-6)
