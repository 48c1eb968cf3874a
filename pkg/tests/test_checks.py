import numpy as np
import pytest

from app.exceptions import CertificateFailure
from app.models.enums.methods import CheckSuite
from app.schemas.checks import CheckFailure, CheckReport, SuiteResult
from app.schemas.phase import ABCPoint
from app.services.checks import sample_interior, sextic_sample_points

def test_sample_interior_is_seeded_and_interior(rng):
    points = sample_interior(rng, 50)
    assert len(points) == 50
    assert all(p.is_interior() for p in points)
    again = sample_interior(np.random.default_rng(12345), 50)
    assert again == points

def test_sextic_sample_points_cover_radii():
    radii = {round(abs(u), 12) for u in sextic_sample_points(12)}
    assert radii == {0.7, 1.0, 1.4}

def test_lensing_suite_passes(checks):
    report = checks.run(CheckSuite.LENSING, samples=10, seed=3)
    suite = report.suites[0]
    assert report.passed
    # the fixed sample point is checked on top of the drawn ones
    assert suite.samples == 11

def test_sextic_suite_passes(checks):
    report = checks.run(CheckSuite.SEXTIC, samples=5, seed=3)
    assert report.passed
    assert report.suites[0].worst < 1e-8

def test_discriminant_suite_passes(checks):
    report = checks.run(CheckSuite.DISCRIMINANT, samples=20, seed=3)
    assert report.passed
    assert report.suites[0].samples == 20

def test_roundtrip_suite_passes(checks):
    report = checks.run(CheckSuite.ROUNDTRIP, samples=10, seed=3)
    assert report.passed
    assert report.suites[0].worst < 1e-10

def test_errors_become_witnesses(checks):
    bad = ABCPoint(a=0.5, b=0.8, c=0.3)
    result = checks.roundtrip_suite([bad, ABCPoint(a=1.1, b=0.85, c=0.6)])
    assert not result.passed
    assert len(result.failures) == 1
    failure = result.failures[0]
    assert failure.detail.startswith("DomainError")
    assert failure.witness["a"] == 0.5

@pytest.mark.slow
def test_series_suite_passes(checks):
    result = checks.series_suite()
    assert result.passed, result.failures
    assert result.samples == 4

def test_require_lists_every_failure(checks):
    report = CheckReport(seed=1, suites=[
        SuiteResult(suite=CheckSuite.SEXTIC, samples=2, tolerance=1e-8, worst=1.0, passed=False,
                    failures=[CheckFailure(detail="sextic residual above tolerance", witness={"a": 1.2})]),
        SuiteResult(suite=CheckSuite.LENSING, samples=1, tolerance=0.0),
    ])
    assert not report.passed
    with pytest.raises(CertificateFailure) as excinfo:
        checks.require(report)
    failures = excinfo.value.witness["failures"]
    assert failures == [{"suite": "sextic", "detail": "sextic residual above tolerance", "a": 1.2}]
    assert excinfo.value.exit_code == 1

def test_require_accepts_passing_report(checks):
    checks.require(CheckReport(seed=1, suites=[SuiteResult(suite=CheckSuite.LENSING, samples=1, tolerance=0.0)]))

def test_discriminant_suite_covers_gamma_b(checks, monkeypatch):
    monkeypatch.setattr("app.services.checks.DISCRIMINANT_TOL", -1.0)
    result = checks.discriminant_suite(np.random.default_rng(7), 6)
    assert [f.witness["surface"] for f in result.failures] == ["low", "high", "gamma_b"] * 2
    assert max(f.witness["residual"] for f in result.failures) < 1e-8
