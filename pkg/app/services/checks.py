"""
Checks Service
==============

Bundles the invariant suites run by `ising2mm check`:
- lensing: polar-function certificate on sampled points of R
- sextic: vanishing of 𝔖(X(u), Y(u)) on sampled curves
- discriminant: vanishing of 𝓙 on both critical surfaces and on γ_b
- roundtrip: σ continuation against a²bc, Jacobian against finite differences
- series: Wick enumeration against the free energy series at orders 1..3

Samples are drawn from a seeded numpy Generator before any work is
dispatched, so results do not depend on the thread count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.exceptions import CertificateFailure, Ising2mmError
from app.models.enums.methods import CheckSuite
from app.schemas.checks import CheckFailure, CheckReport, SuiteResult
from app.schemas.phase import ABCPoint
from app.services.enumeration import EnumerationService
from app.services.free_energy import FreeEnergyService
from app.services.phase_space import PhaseSpaceService
from app.services.spectral_curve import SpectralCurveService
from utils.logger import init_logger

# Configure logger
logger = init_logger("ChecksService")

ROUNDTRIP_TOL = 1e-10
JACOBIAN_TOL = 1e-6
SEXTIC_TOL = 1e-8
DISCRIMINANT_TOL = 1e-8
DISCRIMINANT_SURFACES = ("low", "high", "gamma_b")
SERIES_TOL = 1e-9
SEXTIC_RADII = (0.7, 1.0, 1.4)
SEXTIC_POINTS = 64
SERIES_ORDERS = 3
SERIES_POINTS = ((0.3, 0.0), (0.5, 0.4), (0.15, -0.2))
LENSING_SAMPLE_POINT = ABCPoint(a=1.059, b=0.880, c=0.880)
DEFAULT_SAMPLES = {
    CheckSuite.LENSING: 200,
    CheckSuite.SEXTIC: 20,
    CheckSuite.DISCRIMINANT: 100,
    CheckSuite.ROUNDTRIP: 200,
}

Outcome = Tuple[float, Optional[CheckFailure]]

def sample_interior(rng: np.random.Generator, n: int) -> List[ABCPoint]:
    """
    n points of the interior of R, kept 5% away from its faces:
    a = 1 + α(1/b - 1), c = γb with α, γ in [0.05, 0.95].
    """
    b = rng.uniform(0.1, 0.95, n)
    alpha = rng.uniform(0.05, 0.95, n)
    gamma = rng.uniform(0.05, 0.95, n)
    a = 1.0 + alpha * (1.0 / b - 1.0)
    return [ABCPoint(a=float(x), b=float(y), c=float(z)) for x, y, z in zip(a, b, gamma * b)]

def sextic_sample_points(n: int = SEXTIC_POINTS) -> List[complex]:
    """n points spread over the circles |u| in SEXTIC_RADII."""
    return [
        SEXTIC_RADII[k % len(SEXTIC_RADII)] * complex(math.cos(2 * math.pi * (k + 0.5) / n),
                                                      math.sin(2 * math.pi * (k + 0.5) / n))
        for k in range(n)
    ]

def _abc(p: ABCPoint) -> dict:
    return {"a": p.a, "b": p.b, "c": p.c}

class ChecksService:
    """Service running the invariant suites."""

    def __init__(
            self,
            phase_service: Optional[PhaseSpaceService] = None,
            curve_service: Optional[SpectralCurveService] = None,
            free_energy_service: Optional[FreeEnergyService] = None,
            enumeration_service: Optional[EnumerationService] = None,
            threads: Optional[int] = None
        ):
        """
        Initialize service.

        Args:
            phase_service (Optional[PhaseSpaceService]): parametrization and σ continuation
            curve_service (Optional[SpectralCurveService]): spectral curve and certificates
            free_energy_service (Optional[FreeEnergyService]): F series
            enumeration_service (Optional[EnumerationService]): Wick enumeration
            threads (Optional[int]): worker threads (default settings.THREADS)
        """
        self.phase = phase_service or PhaseSpaceService()
        self.curve = curve_service or SpectralCurveService(self.phase)
        self.free_energy = free_energy_service or FreeEnergyService(self.phase)
        self.enumeration = enumeration_service or EnumerationService()
        self.threads = threads or settings.THREADS

    def _collect(self, suite: CheckSuite, tolerance: float, check: Callable[[object], Outcome],
                 items: Sequence) -> SuiteResult:
        def guarded(item) -> Outcome:
            try:
                return check(item)
            except Ising2mmError as e:
                witness = e.witness if isinstance(e, CertificateFailure) else e.payload
                if isinstance(item, ABCPoint):
                    witness = {**_abc(item), **witness}
                return math.inf, CheckFailure(detail=f"{type(e).__name__}: {e.detail}", witness=witness)

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            outcomes = list(pool.map(guarded, items))
        failures = [f for _, f in outcomes if f is not None]
        worst = max((m for m, _ in outcomes), default=0.0)
        result = SuiteResult(suite=suite, samples=len(items), tolerance=tolerance, worst=worst,
                             passed=not failures, failures=failures)
        if failures:
            logger.warning(f"{suite.value}: {len(failures)} of {len(items)} samples failed")
        else:
            logger.info(f"{suite.value}: {len(items)} samples passed (worst {worst:.3e})")
        return result

    # Suites

    def lensing_suite(self, points: Sequence[ABCPoint], n_theta: int = 256) -> SuiteResult:
        """check_lensing at LENSING_SAMPLE_POINT and every given point."""
        def check(p: ABCPoint) -> Outcome:
            cert = self.curve.check_lensing(p, n_theta)
            locals_ok = all(v is None or v > 0 for v in (cert.q1, cert.q1_tilde))
            if not locals_ok:
                return math.inf, CheckFailure(detail="local constant not positive",
                                              witness={**_abc(p), "q1": cert.q1, "q1_tilde": cert.q1_tilde})
            return -min(cert.margins.values()), None

        return self._collect(CheckSuite.LENSING, 0.0, check, [LENSING_SAMPLE_POINT, *points])

    def sextic_suite(self, points: Sequence[ABCPoint]) -> SuiteResult:
        samples = sextic_sample_points()

        def check(p: ABCPoint) -> Outcome:
            cd = self.curve.curve_from_abc(p)
            coefficients = self.curve.sextic_coefficients(cd)
            residuals = [self.curve.sextic_residual(cd, u, coefficients) for u in samples]
            k = int(np.argmax(residuals))
            if residuals[k] >= SEXTIC_TOL:
                return residuals[k], CheckFailure(
                    detail="sextic residual above tolerance",
                    witness={**_abc(p), "u": [samples[k].real, samples[k].imag], "residual": residuals[k]})
            return residuals[k], None

        return self._collect(CheckSuite.SEXTIC, SEXTIC_TOL, check, points)

    def discriminant_suite(self, rng: np.random.Generator, n: int) -> SuiteResult:
        """𝓙 on samples cycling through S_low r(1/b, b, c), S_high r(1, b, c) and γ_b(c)."""
        b = rng.uniform(0.1, 1.0, n)
        c = b * rng.uniform(0.05, 1.0, n)
        items = [(DISCRIMINANT_SURFACES[k % 3], float(x), float(y)) for k, (x, y) in enumerate(zip(b, c))]

        def check(item) -> Outcome:
            surface, bb, cc = item
            if surface == "low":
                pp = self.phase.critical_surface_low(bb, cc)
            elif surface == "high":
                pp = self.phase.critical_surface_high(bb, cc)
            else:
                pp = self.phase.critical_curve_b(cc)
            residual = self.phase.discriminant_scaled(pp.tau, pp.t, pp.cosh_h)
            if residual >= DISCRIMINANT_TOL:
                witness = {"surface": surface, "c": cc, "tau": pp.tau, "t": pp.t, "H": pp.h, "residual": residual}
                if surface != "gamma_b":
                    witness["b"] = bb
                return residual, CheckFailure(detail="discriminant does not vanish on the critical surface",
                                              witness=witness)
            return residual, None

        return self._collect(CheckSuite.DISCRIMINANT, DISCRIMINANT_TOL, check, items)

    def roundtrip_suite(self, points: Sequence[ABCPoint]) -> SuiteResult:
        def check(p: ABCPoint) -> Outcome:
            pp = self.phase.map_abc(p)
            error = abs(self.phase.solve_sigma(pp).sigma - p.sigma)
            closed = self.phase.jacobian_abc(p)
            numeric = self.phase.jacobian_finite_difference(p)
            jac_error = abs(closed - numeric) / max(abs(numeric), 1e-300)
            witness = {**_abc(p), "tau": pp.tau, "t": pp.t, "H": pp.h}
            if error >= ROUNDTRIP_TOL:
                return error, CheckFailure(detail="solve_sigma(map_abc(p)) differs from a^2 b c",
                                           witness={**witness, "error": error})
            if jac_error >= JACOBIAN_TOL:
                return error, CheckFailure(detail="Jacobian closed form differs from finite differences",
                                           witness={**witness, "closed": closed, "numeric": numeric})
            return error, None

        return self._collect(CheckSuite.ROUNDTRIP, ROUNDTRIP_TOL, check, points)

    def series_suite(self) -> SuiteResult:
        """
        Wick enumeration against F_series at orders 1..3: in floating point at
        SERIES_POINTS, and exactly at τ = 1/2, q = 1.
        """
        def check_float(item) -> Outcome:
            tau, h = item
            wick = self.enumeration.wick_report(tau, h, SERIES_ORDERS)
            series = self.free_energy.series_report(tau, h, SERIES_ORDERS)
            worst, worst_k = 0.0, 1
            for k in range(1, SERIES_ORDERS + 1):
                for other in (series.coefficients[k], series.reference[k - 1]):
                    scale = max(abs(wick.genus_zero[k]), abs(other))
                    gap = abs(wick.genus_zero[k] - other) / scale if scale else 0.0
                    if gap > worst:
                        worst, worst_k = gap, k
            if worst >= SERIES_TOL:
                return worst, CheckFailure(
                    detail="enumerated and closed-form series differ",
                    witness={"tau": tau, "H": h, "order": worst_k, "relative_gap": worst,
                             "enumerated": wick.genus_zero[worst_k], "series": series.coefficients[worst_k]})
            return worst, None

        def check_exact(item) -> Outcome:
            tau, q = item
            wick = self.enumeration.wick_report(tau, q, SERIES_ORDERS, exact=True)
            series = self.free_energy.series_report(tau, q, SERIES_ORDERS, exact=True)
            for k in range(1, SERIES_ORDERS + 1):
                if Fraction(wick.exact[k]) != Fraction(series.exact[k]):
                    return 1.0, CheckFailure(
                        detail="exact enumerated and closed-form series differ",
                        witness={"tau": str(tau), "q": str(q), "order": k,
                                 "enumerated": wick.exact[k], "series": series.exact[k]})
            return 0.0, None

        def check(item) -> Outcome:
            kind, payload = item
            return check_exact(payload) if kind == "exact" else check_float(payload)

        items = [("float", point) for point in SERIES_POINTS] + [("exact", (Fraction(1, 2), Fraction(1)))]
        return self._collect(CheckSuite.SERIES, SERIES_TOL, check, items)

    # Entry point

    def run(self, suite: CheckSuite, samples: Optional[int] = None, seed: Optional[int] = None) -> CheckReport:
        """
        Run one suite, or every suite for CheckSuite.ALL.

        Args:
            suite (CheckSuite): suite to run
            samples (Optional[int]): sample count of the sampled suites (defaults per suite)
            seed (Optional[int]): Generator seed (default settings.SEED)

        Returns:
            CheckReport: results in suite order
        """
        seed = settings.SEED if seed is None else seed
        rng = np.random.default_rng(seed)
        suites = [s for s in CheckSuite if s != CheckSuite.ALL] if suite == CheckSuite.ALL else [suite]

        def count(s: CheckSuite) -> int:
            return samples if samples is not None else DEFAULT_SAMPLES[s]

        results = []
        for s in suites:
            if s == CheckSuite.LENSING:
                results.append(self.lensing_suite(sample_interior(rng, count(s))))
            elif s == CheckSuite.SEXTIC:
                results.append(self.sextic_suite(sample_interior(rng, count(s))))
            elif s == CheckSuite.DISCRIMINANT:
                results.append(self.discriminant_suite(rng, count(s)))
            elif s == CheckSuite.ROUNDTRIP:
                results.append(self.roundtrip_suite(sample_interior(rng, count(s))))
            else:
                results.append(self.series_suite())
        return CheckReport(seed=seed, suites=results)

    @staticmethod
    def require(report: CheckReport) -> None:
        """
        Raises:
            CertificateFailure: any suite failed; the witness lists every failure
        """
        if not report.passed:
            failed = [s.suite.value for s in report.suites if not s.passed]
            raise CertificateFailure(f"failed suites: {', '.join(failed)}",
                                     {"failures": report.witnesses()})
