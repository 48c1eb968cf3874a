"""
Free Energy Service
===================

Evaluates the genus-zero free energy F(τ, t, H):
- The u-integral over the analytic σ branch
- The λ-integral over the planar solution f(λ) of the string equations
- Its Taylor series in t (two independent routes)
- The quartic one-matrix free energy and the decoupling limits τ -> 0, τ -> 1
"""

import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy import integrate, interpolate

from app.config import settings
from app.exceptions import (
    ContinuationFailure,
    DomainError,
    NoConvergence,
    PoleError,
    QuadratureFailure,
)
from app.models.enums.methods import FreeEnergyMethod
from app.schemas.free_energy import DecouplingCheck, FreeEnergyResult, FreeEnergySeries, PlanarCoefficients
from app.schemas.phase import PhasePoint
from app.services.phase_space import POLE_GUARD, PhaseSpaceService, g_prime, g_value
from app.services.series import SeriesService, TruncatedSeries
from utils.logger import init_logger

# Configure logger
logger = init_logger("FreeEnergyService")


def kazakov_coefficients(tau, cosh_h) -> List:
    """
    Orders 1..3 of F in t from the graph expansion, with x = -τ/(4(1-τ²)²) per unit t.
    Works for float, mpf and Fraction scalars.
    """
    x = -tau / (4 * (1 - tau * tau) ** 2)
    cosh_2h = 2 * cosh_h * cosh_h - 1
    first = 4 / tau * cosh_h * x
    second = (8 * tau * tau + 64 + 72 * cosh_2h / (tau * tau)) * x * x / 2
    third = 3456 * cosh_h * (2 * cosh_2h + tau ** 4 + 2 * tau * tau - 1) * x ** 3 / (6 * tau ** 3)
    return [first, second, third]


def _shift(series: TruncatedSeries, k: int) -> TruncatedSeries:
    """series / σ^k for a series with valuation >= k."""
    return TruncatedSeries(series.coeffs[k:], series.order - k)


class FreeEnergyService:
    """Service for F(τ, t, H) and the one-matrix oracle."""

    def __init__(
            self,
            phase_service: Optional[PhaseSpaceService] = None,
            series_service: Optional[SeriesService] = None,
            quad_tol: Optional[float] = None,
            lambda_steps: Optional[int] = None
        ):
        """
        Initialize service.

        Args:
            phase_service (Optional[PhaseSpaceService]): σ continuation and classification
            series_service (Optional[SeriesService]): G(σ) series and reversion
            quad_tol (Optional[float]): absolute quadrature tolerance
            lambda_steps (Optional[int]): continuation nodes on λ in [0, 1]
        """
        self.phase = phase_service or PhaseSpaceService()
        self.series = series_service or SeriesService()
        self.quad_tol = quad_tol or settings.QUAD_TOL
        self.lambda_steps = lambda_steps or settings.LAMBDA_STEPS

    @staticmethod
    def _check_point(pp: PhasePoint) -> None:
        if not 0.0 < pp.tau < 1.0:
            raise DomainError(f"tau must lie in (0, 1), got {pp.tau}")
        if pp.t > 0.0:
            raise DomainError(f"t must be negative, got {pp.t}")

    def _quad(self, func, tol: float, what: str) -> Tuple[float, float]:
        try:
            value, error = integrate.quad(func, 0.0, 1.0, epsabs=0.1 * tol, epsrel=1e-13, limit=200)
        except Exception as e:
            logger.exception(f"quadrature of {what} failed")
            raise QuadratureFailure(f"quadrature of {what} failed: {e}")
        if not math.isfinite(value) or error > tol:
            raise QuadratureFailure(f"quadrature of {what} did not reach {tol:.1e} (estimate {error:.3e})",
                                    {"estimate": error})
        return value, error

    def _sigma(self, pp: PhasePoint) -> float:
        """σ with a relative Newton polish and the λ(σ) = 1 guard."""
        solution = self.phase.solve_sigma(pp)
        sigma, cosh_h = solution.sigma, pp.cosh_h
        if not solution.hit_branch_point:
            for _ in range(3):
                slope = g_prime(sigma, pp.tau, cosh_h)
                if slope == 0.0:
                    break
                sigma -= (g_value(sigma, pp.tau, cosh_h) - pp.t) / slope
        # λ(σ) = 1
        drift = abs(g_value(sigma, pp.tau, cosh_h) / pp.t - 1.0)
        limit = 1e-6 if solution.hit_branch_point else 1e-9
        if drift > limit:
            raise NoConvergence(f"lambda(sigma) = 1 violated by {drift:.3e} at {pp}")
        return sigma

    # u-integral

    def F_eval(self, pp: PhasePoint, tol: Optional[float] = None) -> FreeEnergyResult:
        """
        F = 3/4 + (1/2)log((1-τ²)σ/(-3t)) - ∫_0^σ (λ(u) - λ(u)²/2) du/u.

        The integral runs over v = u/σ in [0, 1]; at v = 0 the integrand is
        replaced by its limit σλ'(0) = σ(τ²-1)/(3t).

        Args:
            pp (PhasePoint): point with 0 < τ < 1 and t <= 0
            tol (Optional[float]): absolute quadrature tolerance

        Returns:
            FreeEnergyResult: F, quadrature estimate and σ

        Raises:
            DomainError: τ outside (0, 1) or t > 0
            BranchPointReached: t beyond t_cr(τ, H)
            QuadratureFailure: tolerance not reached
        """
        tol = tol or self.quad_tol
        self._check_point(pp)
        if pp.t == 0.0:
            return FreeEnergyResult(point=pp, value=0.0, method=FreeEnergyMethod.U_INTEGRAL,
                                    quad_error_estimate=0.0, sigma_used=0.0)
        tau, t, cosh_h = pp.tau, pp.t, pp.cosh_h
        sigma = self._sigma(pp)
        at_zero = sigma * (tau * tau - 1.0) / (3.0 * t)

        def integrand(v: float) -> float:
            if v == 0.0:
                return at_zero
            lam = g_value(sigma * v, tau, cosh_h) / t
            return (lam - 0.5 * lam * lam) / v

        integral, error = self._quad(integrand, tol, "the u-integral")
        value = 0.75 + 0.5 * math.log((1.0 - tau * tau) * sigma / (-3.0 * t)) - integral
        logger.info(f"F_eval at {pp}: F={value:.15g} (sigma={sigma:.15g}, err={error:.2e})")
        return FreeEnergyResult(point=pp, value=value, method=FreeEnergyMethod.U_INTEGRAL,
                                quad_error_estimate=error, sigma_used=sigma)

    def dF_dt(self, pp: PhasePoint, tol: Optional[float] = None) -> float:
        """
        ∂F/∂t = -1/(2t) + (1/t) ∫_0^σ (λ - λ²) du/u.

        The σ-dependence of F drops out because λ(σ) = 1.
        """
        tol = tol or self.quad_tol
        self._check_point(pp)
        if pp.t == 0.0:
            raise DomainError("dF/dt is evaluated at t < 0 only")
        tau, t, cosh_h = pp.tau, pp.t, pp.cosh_h
        sigma = self._sigma(pp)
        at_zero = sigma * (tau * tau - 1.0) / (3.0 * t)

        def integrand(v: float) -> float:
            if v == 0.0:
                return at_zero
            lam = g_value(sigma * v, tau, cosh_h) / t
            return (lam - lam * lam) / v

        integral, _ = self._quad(integrand, tol, "the t-derivative")
        return -0.5 / t + integral / t

    # λ-integral

    @staticmethod
    def lambda_of_f(f: float, pp: PhasePoint) -> float:
        """
        λ = -τf + (3t²/τ)f³ + τf/(τ-3tf)² + 6τ²t f²(cosh H - 1)/(τ²-9t²f²)².
        """
        tau, t = pp.tau, pp.t
        value = -tau * f + 3.0 * t * t * f ** 3 / tau + tau * f / (tau - 3.0 * t * f) ** 2
        if pp.h != 0.0:
            value += 6.0 * tau * tau * t * f * f * (pp.cosh_h - 1.0) / (tau * tau - 9.0 * t * t * f * f) ** 2
        return value

    @staticmethod
    def dlambda_df(f: float, pp: PhasePoint) -> float:
        tau, t = pp.tau, pp.t
        value = -tau + 9.0 * t * t * f * f / tau + tau * (tau + 3.0 * t * f) / (tau - 3.0 * t * f) ** 3
        if pp.h != 0.0:
            d = tau * tau - 9.0 * t * t * f * f
            value += 12.0 * tau * tau * t * (pp.cosh_h - 1.0) * f * (tau * tau + 9.0 * t * t * f * f) / d ** 3
        return value

    def _newton_f(self, lam: float, f: float, pp: PhasePoint) -> Tuple[float, bool]:
        for _ in range(settings.NEWTON_MAX_ITER):
            slope = self.dlambda_df(f, pp)
            if slope <= 0.0:
                return f, False
            delta = (self.lambda_of_f(f, pp) - lam) / slope
            f -= delta
            if abs(delta) <= 1e-15 * max(abs(f), 1e-300):
                return f, True
        return f, abs(self.lambda_of_f(f, pp) - lam) < 1e-13

    def lambda_branch(self, pp: PhasePoint) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Nodes (λ_k, f_k, f'(λ_k)) of the planar branch with f(0) = 0.

        Flow:
        1. Start from f = 0 with slope τ/(1-τ²)
        2. Tangent predictor, Newton corrector on λ(f) = λ_k
        3. Stop with ContinuationFailure when dλ/df stops being positive

        Raises:
            ContinuationFailure: branch folds before λ = 1
        """
        nodes = np.linspace(0.0, 1.0, self.lambda_steps + 1)
        values = np.zeros_like(nodes)
        slopes = np.zeros_like(nodes)
        f = 0.0
        slopes[0] = 1.0 / self.dlambda_df(0.0, pp)
        for k in range(1, len(nodes)):
            guess = f + (nodes[k] - nodes[k - 1]) * slopes[k - 1]
            f_new, ok = self._newton_f(nodes[k], guess, pp)
            if not ok or f_new <= f:
                # retry from the previous node without the predictor
                f_new, ok = self._newton_f(nodes[k], f, pp)
            slope = self.dlambda_df(f_new, pp)
            if not ok or f_new <= f or slope <= 0.0:
                last = nodes[k - 1]
                if k == len(nodes) - 1 and ok and slope >= -1e-8:
                    # the fold sits at λ = 1: critical point
                    values[k], slopes[k] = f_new, math.inf
                    logger.debug(f"f-branch reaches the fold at lambda=1 for {pp}")
                    break
                raise ContinuationFailure(
                    f"f-branch folds near lambda={last:.4f} at {pp}", {"lambda": float(last)})
            values[k], slopes[k] = f_new, 1.0 / slope
            f = f_new
        return nodes, values, slopes

    def f_of_lambda(self, lam: float, pp: PhasePoint) -> float:
        """
        Planar f(λ; τ, t, H), the branch of λ(f) = λ through f(0) = 0.

        Raises:
            DomainError: λ outside [0, 1]
            ContinuationFailure: branch folds before λ
        """
        if not 0.0 <= lam <= 1.0:
            raise DomainError(f"lambda must lie in [0, 1], got {lam}")
        if pp.t == 0.0:
            return pp.tau * lam / (1.0 - pp.tau * pp.tau)
        nodes, values, _ = self.lambda_branch(pp)
        return self._f_from_branch(lam, nodes, values, pp)

    def _f_from_branch(self, lam, nodes, values, pp, spline=None) -> float:
        if lam == 0.0:
            return 0.0
        if spline is not None:
            guess = float(spline(lam))
        else:
            guess = float(np.interp(lam, nodes, values))
        f, ok = self._newton_f(lam, guess, pp)
        if not ok:
            k = min(int(np.searchsorted(nodes, lam)), len(nodes) - 1)
            f, ok = self._newton_f(lam, values[k], pp)
            if not ok:
                raise ContinuationFailure(f"Newton on the f-branch failed at lambda={lam} for {pp}")
        return f

    def F_lambda_form(self, pp: PhasePoint, tol: Optional[float] = None) -> FreeEnergyResult:
        """
        F = ∫_0^1 (1-λ) log[(1-τ²) f(λ)/(τλ)] dλ over the planar branch f(λ).

        The logarithm vanishes at λ = 0, where f ~ τλ/(1-τ²).

        Raises:
            DomainError: τ outside (0, 1) or t > 0
            ContinuationFailure: the branch folds before λ = 1 (beyond criticality)
            QuadratureFailure: tolerance not reached
        """
        tol = tol or self.quad_tol
        self._check_point(pp)
        if pp.t == 0.0:
            return FreeEnergyResult(point=pp, value=0.0, method=FreeEnergyMethod.LAMBDA_INTEGRAL,
                                    quad_error_estimate=0.0, sigma_used=0.0)
        tau = pp.tau
        nodes, values, _ = self.lambda_branch(pp)
        spline = interpolate.PchipInterpolator(nodes, values)

        def integrand(lam: float) -> float:
            if lam == 0.0:
                return 0.0
            f = self._f_from_branch(lam, nodes, values, pp, spline)
            return (1.0 - lam) * math.log((1.0 - tau * tau) * f / (tau * lam))

        value, error = self._quad(integrand, tol, "the lambda-integral")
        sigma = -3.0 * pp.t * values[-1] / tau
        logger.info(f"F_lambda_form at {pp}: F={value:.15g} (sigma={sigma:.15g}, err={error:.2e})")
        return FreeEnergyResult(point=pp, value=value, method=FreeEnergyMethod.LAMBDA_INTEGRAL,
                                quad_error_estimate=error, sigma_used=sigma)

    def evaluate(self, pp: PhasePoint, method: FreeEnergyMethod = FreeEnergyMethod.U_INTEGRAL,
                 tol: Optional[float] = None) -> FreeEnergyResult:
        if method == FreeEnergyMethod.LAMBDA_INTEGRAL:
            return self.F_lambda_form(pp, tol)
        return self.F_eval(pp, tol)

    # Planar relations

    def planar_relations(self, f: float, pp: PhasePoint) -> PlanarCoefficients:
        """
        Closed forms of the planar limits at a given f:

            S = t e^{-H} f³/τ,            S̃ = t e^{H} f³/τ
            R = (τ + 3te^{-H}f) f/(τ² - 9t²f²),   R̃ = (τ + 3te^{H}f) f/(τ² - 9t²f²)

        and the two expressions of λ they produce,

            λ_C = -τf + R̃ + 3te^{-H}(S̃ + R̃²),   λ_D = -τf + R + 3te^{H}(S + R²).

        Raises:
            PoleError: τ² = 9t²f²
        """
        tau, t = pp.tau, pp.t
        q, q_inv = math.exp(pp.h), math.exp(-pp.h)
        denominator = tau * tau - 9.0 * t * t * f * f
        if abs(denominator) < POLE_GUARD:
            raise PoleError(f"tau^2 = 9 t^2 f^2 at f={f}", {"f": f})
        S = t * q_inv * f ** 3 / tau
        St = t * q * f ** 3 / tau
        R = (tau + 3.0 * t * q_inv * f) * f / denominator
        Rt = (tau + 3.0 * t * q * f) * f / denominator
        lambda_c = -tau * f + Rt + 3.0 * t * q_inv * (St + Rt * Rt)
        lambda_d = -tau * f + R + 3.0 * t * q * (S + R * R)
        string_residual = max(abs(tau * R - f * (1.0 + 3.0 * t * q_inv * Rt)),
                              abs(tau * Rt - f * (1.0 + 3.0 * t * q * R)))
        return PlanarCoefficients(f=f, R=R, S=S, Rt=Rt, St=St, lambda_c=lambda_c, lambda_d=lambda_d,
                                  string_residual=string_residual)

    def string_relations(self, f: float, pp: PhasePoint) -> Tuple[float, float]:
        """Residuals of τR = f(1 + 3te^{-H}R̃) and τR̃ = f(1 + 3te^{H}R)."""
        planar = self.planar_relations(f, pp)
        tau, t = pp.tau, pp.t
        return (tau * planar.R - f * (1.0 + 3.0 * t * math.exp(-pp.h) * planar.Rt),
                tau * planar.Rt - f * (1.0 + 3.0 * t * math.exp(pp.h) * planar.R))

    # One-matrix model

    def F_one_matrix(self, t: float, tol: Optional[float] = None) -> float:
        """
        𝓕(t) = ∫_0^1 (1-λ) log[(-1 + √(1+12tλ))/(6tλ)] dλ, the quartic one-matrix free energy.

        The ratio is evaluated as 2/(1 + √(1+12tλ)), which equals 1 at λ = 0.

        Raises:
            DomainError: t <= -1/12
        """
        tol = tol or self.quad_tol
        if t <= -1.0 / 12.0:
            raise DomainError(f"one-matrix model requires t > -1/12, got {t}")
        if t == 0.0:
            return 0.0

        def integrand(lam: float) -> float:
            return (1.0 - lam) * math.log(2.0 / (1.0 + math.sqrt(1.0 + 12.0 * t * lam)))

        value, _ = self._quad(integrand, tol, "the one-matrix integral")
        return value

    def decoupling_checks(
            self,
            t_values: Sequence[float] = (-0.02, -0.05),
            tau_low: float = 1e-3,
            tau_high: float = 0.999
        ) -> List[DecouplingCheck]:
        """
        Compare F with the one-matrix model at both temperature ends.

        Low temperature: F(τ, (1-τ²)t, 0) -> 2𝓕(t) as τ -> 0 (two decoupled copies).
        High temperature: F(τ, (1-τ²)²t/τ, 0) -> 𝓕(2t) as τ -> 1 (X = Y).
        """
        checks = []
        for t in t_values:
            low_point = PhasePoint(tau=tau_low, t=(1.0 - tau_low ** 2) * t, h=0.0)
            low = self.F_eval(low_point).value
            reference = 2.0 * self.F_one_matrix(t)
            checks.append(DecouplingCheck(side="low", tau=tau_low, t=t, value=low, reference=reference,
                                          difference=abs(low - reference)))
            high_point = PhasePoint(tau=tau_high, t=(1.0 - tau_high ** 2) ** 2 * t / tau_high, h=0.0)
            high = self.F_eval(high_point).value
            reference = self.F_one_matrix(2.0 * t)
            checks.append(DecouplingCheck(side="high", tau=tau_high, t=t, value=high, reference=reference,
                                          difference=abs(high - reference)))
        for check in checks:
            logger.info(f"decoupling {check.side}: t={check.t} |F - ref|={check.difference:.3e}")
        return checks

    # Series in t

    def F_series(self, tau, h, order: int, exact: bool = False, extended: bool = False) -> TruncatedSeries:
        """
        F as a series in t from the closed form in σ,

            F = 3/4 - (1/2) log(P/(p_1 σ)) - I_1/P + I_2/(2P²),

        with P(σ) = -G(σ) = p_1 σ + ..., I_1 = ∫_0^σ P du/u and I_2 = ∫_0^σ P² du/u,
        composed with the reverted series σ(t).

        Args:
            tau: coupling τ (Fraction when exact)
            h: magnetic field H (q = e^H when exact)
            order (int): highest power of t
            exact (bool): rational arithmetic
            extended (bool): mpmath arithmetic

        Raises:
            DomainError: τ outside (0, 1)
        """
        if not 0 < float(tau) < 1:
            raise DomainError(f"tau must lie in (0, 1), got {tau}")
        with mpmath.mp.workdps(self.series.extended_dps):
            g = self.series.g_series(tau, h, order + 3, exact=exact, extended=extended)
            P = -g
            p1 = P[1]
            P_over = _shift(P, 1)
            I1_over = _shift(P_over.integral(), 1)
            I2_over = _shift(_shift(P * P, 1).integral(), 2)
            P_over = P_over.truncate(order)
            ratio1 = I1_over.truncate(order) / P_over
            ratio2 = I2_over.truncate(order) / (P_over * P_over)
            log_term = (P_over / p1).log()
            phi = ratio2 / 2 - ratio1 - log_term / 2 + g.one * 3 / 4
            sigma_t = g.truncate(order).revert()
            return phi.compose(sigma_t)

    def F_series_log_route(self, tau, h, order: int, exact: bool = False, extended: bool = False) -> TruncatedSeries:
        """
        F = Σ_k ℓ_k t^k/((k+1)(k+2)) with log ψ(t) = Σ ℓ_k t^k and ψ(t) = -p_1 σ(t)/t.
        """
        if not 0 < float(tau) < 1:
            raise DomainError(f"tau must lie in (0, 1), got {tau}")
        with mpmath.mp.workdps(self.series.extended_dps):
            g = self.series.g_series(tau, h, order + 1, exact=exact, extended=extended)
            p1 = -g[1]
            psi = _shift(g.revert(), 1) * (-p1)
            log_psi = psi.log()
            coeffs = [log_psi[k] / ((k + 1) * (k + 2)) for k in range(order + 1)]
            return TruncatedSeries(coeffs, order)

    def series_report(self, tau: float, h: float, order: int, exact: bool = False,
                      extended: bool = False) -> FreeEnergySeries:
        """
        Both series routes side by side with the closed-form orders 1..3.

        In exact mode `tau` and `h` (read as q) are parsed as fractions.
        """
        if exact:
            tau_s, q = Fraction(str(tau)), Fraction(str(h))
            cosh_h = (q + 1 / q) / 2
            h_float = math.log(float(q))
        else:
            tau_s, q, cosh_h, h_float = tau, None, math.cosh(h), h
        arg = q if exact else h
        closed = self.F_series(tau_s, arg, order, exact=exact, extended=extended)
        log_route = self.F_series_log_route(tau_s, arg, order, exact=exact, extended=extended)
        worst = 0.0
        for x, y in zip(closed.coeffs, log_route.coeffs):
            scale = max(abs(x), abs(y))
            if scale:
                worst = max(worst, float(abs(x - y) / scale))
        if worst > 1e-9:
            logger.warning(f"F series routes disagree by {worst:.3e} at tau={tau}, H={h_float}")
        reference = [float(c) for c in kazakov_coefficients(tau_s, cosh_h)]
        logger.info(f"F series to order {order} at tau={tau}, H={h_float}")
        return FreeEnergySeries(
            tau=float(tau_s),
            h=h_float,
            order=order,
            coefficients=closed.to_float(),
            coefficients_log_route=log_route.to_float(),
            reference=reference,
            max_relative_discrepancy=worst,
            exact=[str(c) for c in closed.coeffs] if exact else None,
        )
