"""
Asymptotics Service
===================

Large-order behavior of the Taylor coefficients of σ(τ, t, 0) in t:
- Saddle points of the coefficient integral ∮ dζ / G(ζ)^V
- Saddle-point forms away from τ = 1/4, with optional 1/V and 1/V² corrections
- The uniform Airy form across τ = 1/4
- Coefficient-ratio estimates of the radius of convergence

Coefficients are compared in the contour normalization
I_V = (1/2πi) ∮ dζ / G(ζ)^V = V [t^V] σ(t) = σ_V / (V-1)!.
"""

import math
from functools import lru_cache
from typing import List, Optional, Tuple

import mpmath
from scipy import special

from app.config import settings
from app.exceptions import DomainError, EvaluationUnstable, GuardBand, InsufficientWindow, RangeError
from app.models.enums.phase import Regime
from app.schemas.asymptotics import AiryCoefficients, AsymptoticEstimate, RatioEstimate
from app.schemas.series import SigmaCoefficients
from app.services.phase_space import PhaseSpaceService
from app.services.series import SeriesService
from utils.logger import init_logger

# Configure logger
logger = init_logger("AsymptoticsService")

AIRY_RANGE = (-12.0, 20.0)
CRITICAL_TAU = 0.25


def t_low(tau: float) -> float:
    return -1.0 / 12.0 + (2.0 / 9.0) * tau * tau


def t_high(tau: float) -> float:
    s = math.sqrt(tau)
    return -(2.0 / 9.0) * s * (s - 1.0) ** 2 * (s + 2.0)


@lru_cache(maxsize=64)
def _contour_coefficients(tau: float, order: int, dps: int) -> Tuple:
    """(I_1, ..., I_order) in extended precision."""
    service = SeriesService(extended_dps=dps)
    with mpmath.mp.workdps(dps):
        coeffs = service.taylor_sigma_coeffs(tau, 0.0, order, extended=True)
        return tuple(c * V for V, c in enumerate(coeffs, start=1))


class AsymptoticsService:
    """Service for exact and asymptotic σ coefficients at H = 0."""

    def __init__(
            self,
            series_service: Optional[SeriesService] = None,
            phase_service: Optional[PhaseSpaceService] = None,
            guard_band: Optional[float] = None,
            airy_band: Optional[float] = None
        ):
        """
        Initialize service.

        Args:
            series_service (Optional[SeriesService]): coefficient extraction
            phase_service (Optional[PhaseSpaceService]): critical values
            guard_band (Optional[float]): half-width around τ = 1/4 refused by the saddle forms
            airy_band (Optional[float]): half-width around τ = 1/4 accepted by the Airy form
        """
        self.series = series_service or SeriesService()
        self.phase = phase_service or PhaseSpaceService()
        self.guard_band = guard_band or settings.GUARD_BAND
        self.airy_band = airy_band or settings.AIRY_BAND

    @staticmethod
    def _check_tau(tau: float) -> None:
        if not 0.0 < tau < 1.0:
            raise DomainError(f"tau must lie in (0, 1), got {tau}")

    # Saddle points

    @staticmethod
    def saddle_points(tau: float) -> List[complex]:
        """Zeros of dG/dζ at H = 0: 1, -1 ± τ^{-1/2}, -1 ± iτ^{-1/2}."""
        r = tau ** -0.5
        return [complex(1.0, 0.0), complex(-1.0 + r, 0.0), complex(-1.0 - r, 0.0),
                complex(-1.0, r), complex(-1.0, -r)]

    @staticmethod
    def dominant_saddle(tau: float) -> float:
        return 1.0 if tau < CRITICAL_TAU else tau ** -0.5 - 1.0

    def regime(self, tau: float) -> Regime:
        if abs(tau - CRITICAL_TAU) < self.guard_band:
            return Regime.AIRY_UNIFORM
        return Regime.LOW_TEMP if tau < CRITICAL_TAU else Regime.HIGH_TEMP

    # Exact coefficients

    def exact_sigma_coeffs(self, tau: float, h: float = 0.0, order: Optional[int] = None) -> SigmaCoefficients:
        """σ_V = V! [t^V] σ(t) by reversion and by Lagrange extraction, in extended precision."""
        self._check_tau(tau)
        return self.series.lagrange_sigma_coeffs(tau, h, order, extended=True)

    def contour_coefficients(self, tau: float, order: int) -> List:
        """I_1 .. I_order as mpf values."""
        self._check_tau(tau)
        return list(_contour_coefficients(float(tau), int(order), self.series.extended_dps))

    # Saddle-point forms

    def laplace_corrections(self, tau: float) -> Tuple[float, float]:
        """
        Coefficients c_1, c_2 of 1 + c_1/V + c_2/V² at the dominant saddle.

        With f = log(-G) and f_k its derivatives there,
            c_1 = 5f_3²/(24f_2³) - f_4/(8f_2²)
            c_2 = 385f_3⁴/(1152f_2⁶) - 35f_3²f_4/(64f_2⁵) + 35f_4²/(384f_2⁴)
                  + 7f_3f_5/(48f_2⁴) - f_6/(48f_2³)
        """
        with mpmath.mp.workdps(self.series.extended_dps):
            tau_m = mpmath.mpf(tau)

            def log_minus_g(z):
                return mpmath.log(tau_m ** 2 * z * (z * z - 3) / 9 + z / (3 * (1 + z) ** 2))

            z = mpmath.mpf(1) if tau < CRITICAL_TAU else 1 / mpmath.sqrt(tau_m) - 1
            f2, f3, f4, f5, f6 = (mpmath.diff(log_minus_g, z, n) for n in range(2, 7))
            c1 = 5 * f3 ** 2 / (24 * f2 ** 3) - f4 / (8 * f2 ** 2)
            c2 = (385 * f3 ** 4 / (1152 * f2 ** 6) - 35 * f3 ** 2 * f4 / (64 * f2 ** 5)
                  + 35 * f4 ** 2 / (384 * f2 ** 4) + 7 * f3 * f5 / (48 * f2 ** 4) - f6 / (48 * f2 ** 3))
            return float(c1), float(c2)

    def saddle_form(self, tau: float, V: int, corrections: int = 0) -> float:
        """
        Asymptotic I_V for τ away from 1/4.

        τ < 1/4: (1/√(3πV)) √((8τ²-3)/(16τ²-1)) t_low^{-V}
        τ > 1/4: ((1-√τ)/(2√(3πV))) √((2+√τ)/(τ(2√τ-1))) t_high^{-V}

        Raises:
            GuardBand: |τ - 1/4| within the guard band
        """
        self._check_tau(tau)
        if abs(tau - CRITICAL_TAU) < self.guard_band:
            raise GuardBand(f"tau={tau} lies within {self.guard_band} of 1/4; use the Airy form",
                            {"tau": tau, "guard_band": self.guard_band})
        if not 0 <= corrections <= 2:
            raise DomainError(f"corrections must be 0, 1 or 2, got {corrections}")
        s = math.sqrt(tau)
        if tau < CRITICAL_TAU:
            prefactor = math.sqrt((8 * tau * tau - 3) / (16 * tau * tau - 1)) / math.sqrt(3 * math.pi * V)
            t_cr = t_low(tau)
        else:
            prefactor = (1 - s) / (2 * math.sqrt(3 * math.pi * V)) * math.sqrt((2 + s) / (tau * (2 * s - 1)))
            t_cr = t_high(tau)
        if corrections:
            c1, c2 = self.laplace_corrections(tau)
            prefactor *= 1 + c1 / V + (c2 / V ** 2 if corrections == 2 else 0.0)
        magnitude = math.exp(math.log(prefactor) - V * math.log(-t_cr))
        return magnitude if V % 2 == 0 else -magnitude

    def sigma_coeff_asymptotic(self, tau: float, V: int, corrections: int = 0) -> AsymptoticEstimate:
        """
        Saddle-point estimate of I_V with the exact value attached.

        Raises:
            GuardBand: |τ - 1/4| within the guard band
        """
        estimate = self.saddle_form(tau, V, corrections)
        exact = float(self.contour_coefficients(tau, V)[V - 1])
        regime = Regime.LOW_TEMP if tau < CRITICAL_TAU else Regime.HIGH_TEMP
        ratio = estimate / exact if exact else math.nan
        logger.info(f"saddle estimate tau={tau} V={V}: ratio {ratio:.6f} ({corrections} corrections)")
        return AsymptoticEstimate(tau=tau, V=V, exact=exact, estimate=estimate, regime=regime,
                                  ratio=ratio, corrections=corrections)

    # Uniform Airy form

    def airy_coefficients(self, tau: float) -> AiryCoefficients:
        """
        s(τ), C(τ), a_0(τ), b_0(τ) in a form without cancellations at τ = 1/4.

        With r = √τ and x = t_low/t_high - 1 = (2r+3)(2r-1)³/(36 t_high),
            ρ = √s / |1-2r| = ((3/4)(2r+3)/(36|t_high|) · log1p(x)/x)^{1/3}
            D_1 = √((4/3)(3-8τ²)ρ/((1+2r)(1+4τ))),  D_h = √((1-r)²(2+r)ρ/(3τ))
            a_0 = (D_1 + D_h)/2
            b_0 = -Q(r)/(3r²(1+2r)(1+4r²)) / (2(D_1 + D_h)),  Q = -20r⁵-12r⁴+5r³+5r+2
        D_1 and D_h are dζ/du at the images of the two coalescing saddles.
        """
        self._check_tau(tau)
        r = math.sqrt(tau)
        th, tl = t_high(tau), t_low(tau)
        x = (2 * r + 3) * (2 * r - 1) ** 3 / (36 * th)
        log_ratio = math.log1p(x) / x if x != 0.0 else 1.0
        rho = (0.75 * (2 * r + 3) / (36 * abs(th)) * log_ratio) ** (1.0 / 3.0)
        s = (rho * (1 - 2 * r)) ** 2
        d1 = math.sqrt(4.0 / 3.0 * (3 - 8 * tau * tau) * rho / ((1 + 2 * r) * (1 + 4 * tau)))
        dh = math.sqrt((1 - r) ** 2 * (2 + r) * rho / (3 * tau))
        q = -20 * r ** 5 - 12 * r ** 4 + 5 * r ** 3 + 5 * r + 2
        a0 = 0.5 * (d1 + dh)
        b0 = -q / (3 * r * r * (1 + 2 * r) * (1 + 4 * tau)) / (2 * (d1 + dh))
        if not all(math.isfinite(v) for v in (s, a0, b0)):
            raise EvaluationUnstable(f"Airy coefficients are not finite at tau={tau}")
        return AiryCoefficients(tau=tau, s=s, C=-0.5 * math.log(tl * th), a0=a0, b0=b0, saddle_slopes=[d1, dh])

    def airy_form(self, tau: float, V: int) -> float:
        """
        (-1)^V |t_low t_high|^{-V/2} [a_0 V^{-1/3} Ai(V^{2/3}s) - b_0 V^{-2/3} Ai'(V^{2/3}s)].

        Raises:
            DomainError: τ outside the Airy band
            RangeError: V^{2/3}s beyond the supported Airy range
        """
        if abs(tau - CRITICAL_TAU) > self.airy_band:
            raise DomainError(f"tau={tau} lies outside the Airy band of width {self.airy_band}",
                              {"tau": tau, "airy_band": self.airy_band})
        coeffs = self.airy_coefficients(tau)
        z = V ** (2.0 / 3.0) * coeffs.s
        bracket = coeffs.a0 * V ** (-1.0 / 3.0) * self.airy_ai(z) - coeffs.b0 * V ** (-2.0 / 3.0) * self.airy_ai_prime(z)
        if not bracket > 0.0:
            raise EvaluationUnstable(f"Airy bracket not positive at tau={tau}, V={V}")
        magnitude = math.exp(math.log(bracket) + V * coeffs.C)
        return magnitude if V % 2 == 0 else -magnitude

    def sigma_coeff_airy(self, tau: float, V: int) -> AsymptoticEstimate:
        estimate = self.airy_form(tau, V)
        exact = float(self.contour_coefficients(tau, V)[V - 1])
        ratio = estimate / exact if exact else math.nan
        logger.info(f"Airy estimate tau={tau} V={V}: ratio {ratio:.6f}")
        return AsymptoticEstimate(tau=tau, V=V, exact=exact, estimate=estimate,
                                  regime=Regime.AIRY_UNIFORM, ratio=ratio)

    def estimate(self, tau: float, V: int, corrections: int = 0) -> AsymptoticEstimate:
        """Airy form inside the guard band, saddle form outside."""
        if self.regime(tau) == Regime.AIRY_UNIFORM:
            return self.sigma_coeff_airy(tau, V)
        return self.sigma_coeff_asymptotic(tau, V, corrections)

    # Airy functions

    @staticmethod
    def _check_airy(x: float) -> None:
        if not AIRY_RANGE[0] <= x <= AIRY_RANGE[1]:
            raise RangeError(f"Airy argument {x} outside [{AIRY_RANGE[0]}, {AIRY_RANGE[1]}]", {"x": x})

    @classmethod
    def airy_ai(cls, x: float) -> float:
        cls._check_airy(x)
        return float(special.airy(x)[0])

    @classmethod
    def airy_ai_prime(cls, x: float) -> float:
        cls._check_airy(x)
        return float(special.airy(x)[1])

    @classmethod
    def airy_bi(cls, x: float) -> float:
        cls._check_airy(x)
        return float(special.airy(x)[2])

    @classmethod
    def airy_bi_prime(cls, x: float) -> float:
        cls._check_airy(x)
        return float(special.airy(x)[3])

    # Ratio method

    def ratio_estimate(self, tau: float, V: int, h: float = 0.0) -> RatioEstimate:
        """
        t_cr from consecutive coefficients: r_V = c_V / c_{V+1} and its linear
        extrapolation in 1/V, V r_V - (V-1) r_{V-1}.

        Raises:
            InsufficientWindow: V < 3
        """
        self._check_tau(tau)
        if V < 3:
            raise InsufficientWindow(f"ratio estimate needs V >= 3, got {V}")
        with mpmath.mp.workdps(self.series.extended_dps):
            if h == 0.0:
                coeffs = [c / (k + 1) for k, c in enumerate(self.contour_coefficients(tau, V + 1))]
            else:
                coeffs = self.series.taylor_sigma_coeffs(tau, h, V + 1, extended=True)
            r_now = coeffs[V - 1] / coeffs[V]
            r_prev = coeffs[V - 2] / coeffs[V - 1]
            extrapolated = V * r_now - (V - 1) * r_prev
        t_cr = self.phase.t_critical(tau, h)
        return RatioEstimate(tau=tau, V=V, raw=float(r_now), extrapolated=float(extrapolated),
                             t_critical=t_cr, relative_error=abs(float(extrapolated) / t_cr - 1.0))
