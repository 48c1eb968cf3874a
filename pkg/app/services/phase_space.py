"""
Phase Space Service
===================

Handles the geometry of the (τ, t, H) phase space:
- The (a, b, c) -> (τ, t, q) parametrization and its Jacobian
- The implicit σ-equation 𝔍(σ; τ, t, q) = 0 and its analytic branch
- Critical values t_cr(τ, H), critical surfaces and the curve γ_b
- The discriminant 𝓙(τ, t, cosh H)
- Region classification and the inverse map (τ, t, q) -> (a, b, c)
"""

import math
from typing import List, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy import optimize

from app.config import settings
from app.exceptions import BranchPointReached, DomainError, Ising2mmError, NoConvergence, PoleError
from app.models.enums.phase import RegionLabel
from app.schemas.phase import ABCPoint, Classification, PhasePoint, SigmaSolution
from utils.logger import init_logger

# Configure logger
logger = init_logger("PhaseSpaceService")

MULTICRITICAL = (0.25, -5.0 / 72.0, 0.0)
POLE_GUARD = 1e-12
ROOT_IMAG_TOL = 1e-7

# 𝓙(τ, t, C) as (coefficient, power of τ, power of t, power of C)
DISCRIMINANT_MONOMIALS = (
    (32400000, 4, 1, 5),
    (1350000, 8, 0, 4), (388800000, 4, 2, 4), (-2700000, 6, 0, 4), (1350000, 4, 0, 4),
    (113760000, 8, 1, 3), (1008936000, 4, 3, 3), (-98820000, 6, 1, 3),
    (157464000, 2, 3, 3), (-43740000, 4, 1, 3),
    (3840000, 12, 0, 2), (-423014400, 8, 2, 2), (-10560000, 10, 0, 2), (-1700611200, 4, 4, 2),
    (-235612800, 6, 2, 2), (7440000, 8, 0, 2), (-306110016, 0, 6, 2), (2173003200, 2, 4, 2),
    (-666646200, 4, 2, 2), (1440000, 6, 0, 2), (25223400, 2, 2, 2), (-2160000, 4, 0, 2),
    (-10174464, 12, 1, 1), (403107840, 8, 3, 1), (60549120, 10, 1, 1), (-3809369088, 4, 5, 1),
    (2205895680, 6, 3, 1), (-197475840, 8, 1, 1), (-3673320192, 0, 7, 1), (8865853056, 2, 5, 1),
    (-2979218880, 4, 3, 1), (147277440, 6, 1, 1), (-25509168, 0, 5, 1), (249930360, 2, 3, 1),
    (-1451520, 4, 1, 1), (1275264, 2, 1, 1),
    (-65536, 16, 0, 0), (5308416, 12, 2, 0), (1277952, 14, 0, 0), (-161243136, 8, 4, 0),
    (-29859840, 10, 2, 0), (-7827456, 12, 0, 0), (2176782336, 4, 6, 0), (-362797056, 6, 4, 0),
    (-21772800, 8, 2, 0), (15861760, 10, 0, 0), (-11019960576, 0, 8, 0), (8979227136, 2, 6, 0),
    (-5048925696, 4, 4, 0), (806993280, 6, 2, 0), (-12437760, 8, 0, 0), (-153055008, 0, 6, 0),
    (583036704, 2, 4, 0), (42729120, 4, 2, 0), (2624256, 6, 0, 0), (-531441, 0, 4, 0),
    (6601824, 2, 2, 0), (546048, 4, 0, 0), (20736, 2, 0, 0),
)


def abc_polynomials(a, b, c):
    """P_c, P_b and K of the parametrization (numpy-broadcastable)."""
    a2, b2, c2 = a * a, b * b, c * c
    p_c = a2 * a2 * c2 + a2 * b2 * c2 + a2 + c2
    p_b = a2 * a2 * b2 + a2 * b2 * c2 + a2 + b2
    k = a2 * a2 * b2 * c2 + 3 * a2 * a2 + 3 * a2 * b2 + 3 * a2 * c2 + 3 * b2 * c2 - 3
    return p_c, p_b, k


def abc_to_phase(a, b, c):
    """(τ, t, q) for arrays of (a, b, c)."""
    p_c, p_b, k = abc_polynomials(a, b, c)
    tau = 1.0 / np.sqrt(p_c * p_b)
    t = -a * a * b * c * k / (9.0 * p_c * p_b)
    q = c * p_b / (b * p_c)
    return tau, t, q


def g_value(sigma: float, tau: float, cosh_h: float) -> float:
    """G(σ) = 𝔍(σ; τ, t, q) + t."""
    s = sigma
    value = -(tau * tau / 9.0) * s * (s * s - 3.0) - (s / (1.0 + s) ** 2) / 3.0
    if cosh_h != 1.0:
        value += (2.0 / 3.0) * (s / (1.0 - s * s)) ** 2 * (cosh_h - 1.0)
    return value


def g_prime(sigma: float, tau: float, cosh_h: float) -> float:
    """dG/dσ = ∂𝔍/∂σ."""
    s = sigma
    value = -(tau * tau / 3.0) * (s * s - 1.0) - (1.0 - s) / (3.0 * (1.0 + s) ** 3)
    if cosh_h != 1.0:
        value += (4.0 / 3.0) * (cosh_h - 1.0) * s * (1.0 + s * s) / (1.0 - s * s) ** 3
    return value


class PhaseSpaceService:
    """Service for the parametrization, σ-equation and classification."""

    def __init__(self, strict: Optional[bool] = None, classify_tol: Optional[float] = None):
        """
        Initialize service.

        Args:
            strict (Optional[bool]): reject (a,b,c) outside R (default settings.STRICT_DOMAIN)
            classify_tol (Optional[float]): relative tolerance for surface labels
        """
        self.strict = settings.STRICT_DOMAIN if strict is None else strict
        self.classify_tol = classify_tol or settings.CLASSIFY_TOL

    # Parametrization

    def _check_abc(self, p: ABCPoint) -> None:
        if self.strict and not p.in_region():
            raise DomainError(
                f"(a,b,c)=({p.a}, {p.b}, {p.c}) lies outside R",
                {"a": p.a, "b": p.b, "c": p.c},
            )

    def map_abc(self, p: ABCPoint) -> PhasePoint:
        """
        Evaluate (τ, t, q) at a point of R.

        Args:
            p (ABCPoint): point of R

        Returns:
            PhasePoint: (τ, t, H = log q)

        Raises:
            DomainError: p outside R in strict mode
        """
        self._check_abc(p)
        tau, t, q = abc_to_phase(p.a, p.b, p.c)
        return PhasePoint.from_q(float(tau), float(t), float(q))

    def jacobian_abc(self, p: ABCPoint) -> float:
        """Closed-form determinant ∂(τ, t, q)/∂(a, b, c)."""
        a, b, c = p.a, p.b, p.c
        a2, b2, c2 = a * a, b * b, c * c
        p_c, p_b, _ = abc_polynomials(a, b, c)
        numerator = (
            -4.0 * a * c * (a2 - 1.0) * (a2 + 1.0) * (a2 * b2 - 1.0) * (a2 * c2 - 1.0)
            * (b2 * c2 - 1.0) * (a2 - b2) * (a2 - c2)
        )
        return numerator / (3.0 * b * p_b ** 1.5 * p_c ** 3.5)

    def jacobian_finite_difference(self, p: ABCPoint, step: float = 1e-5) -> float:
        """Central-difference determinant of map_abc."""
        base = np.array([p.a, p.b, p.c])
        matrix = np.empty((3, 3))
        for j in range(3):
            shift = np.zeros(3)
            shift[j] = step
            plus = np.array(abc_to_phase(*(base + shift)))
            minus = np.array(abc_to_phase(*(base - shift)))
            matrix[:, j] = (plus - minus) / (2.0 * step)
        return float(np.linalg.det(matrix))

    # The σ-equation

    @staticmethod
    def _guard_poles(value: float, h: float) -> None:
        if abs(1.0 + value) < POLE_GUARD or (h != 0.0 and abs(value * value - 1.0) < POLE_GUARD):
            raise PoleError(f"sigma={value} is at a pole of the sigma-equation (H={h})", {"sigma": value})

    def I_eval(self, sigma: float, pp: PhasePoint) -> float:
        """
        𝔍(σ; τ, t, q) = -t - (τ²/9)σ(σ²-3) - (1/3)σ/(1+σ)² + (2/3)(σ/(1-σ²))²(cosh H - 1).

        Raises:
            PoleError: σ at -1, or at ±1 when H != 0
        """
        self._guard_poles(sigma, pp.h)
        return -pp.t + g_value(sigma, pp.tau, pp.cosh_h)

    def dI_dsigma(self, sigma: float, pp: PhasePoint) -> float:
        self._guard_poles(sigma, pp.h)
        return g_prime(sigma, pp.tau, pp.cosh_h)

    def lambda_eval(self, u: float, pp: PhasePoint) -> float:
        """
        λ(u) = -(1/t)[(τ²/9)u(u²-3) + (1/3)u/(u+1)² - (2/3)(u/(u²-1))²(cosh H - 1)].

        Raises:
            DomainError: t == 0
            PoleError: u at a pole
        """
        if pp.t == 0.0:
            raise DomainError("lambda is undefined at t = 0")
        self._guard_poles(u, pp.h)
        return g_value(u, pp.tau, pp.cosh_h) / pp.t

    # Folds and critical values

    @staticmethod
    def t_low(tau: float) -> float:
        return -1.0 / 12.0 + (2.0 / 9.0) * tau * tau

    @staticmethod
    def t_high(tau: float) -> float:
        s = math.sqrt(tau)
        return -(2.0 / 9.0) * s * (s - 1.0) ** 2 * (s + 2.0)

    def fold_point(self, tau: float, h: float) -> Tuple[float, float]:
        """
        First zero σ* > 0 of ∂𝔍/∂σ and the critical value t_cr = G(σ*).

        Flow:
        1. Tabulate G' on (0, σ_max): σ_max = 1 when H != 0 (pole), 1.5 when H = 0
        2. Take the first sign change and refine with brentq
        3. A local maximum of G' that reaches 0 without crossing (τ = 1/4 at H = 0)
           is refined with a bounded scalar minimization and counts as the fold

        Raises:
            NoConvergence: no fold located
        """
        cosh_h = math.cosh(h)
        if h == 0.0:
            grid = np.linspace(0.0, 1.5, 3001)[1:]
        else:
            grid = np.concatenate([np.linspace(0.0, 0.999, 2000)[1:], 1.0 - np.logspace(-3.5, -12, 60)])

        def derivative(s):
            return g_prime(float(s), tau, cosh_h)

        values = np.array([derivative(s) for s in grid])
        crossings = np.nonzero(values >= 0.0)[0]
        stop = crossings[0] if crossings.size else len(grid)
        # a maximum touching zero before the first crossing ends the branch first
        for i in range(1, stop - 1):
            if values[i] >= values[i - 1] and values[i] >= values[i + 1] and values[i] > -10 * settings.BRANCH_DETECT:
                res = optimize.minimize_scalar(
                    lambda s: -derivative(s), bounds=(grid[i - 1], grid[i + 1]),
                    method="bounded", options={"xatol": 1e-12},
                )
                if -res.fun > -1e-12:
                    sigma_star = float(res.x)
                    if -res.fun > 0.0 and values[i - 1] < 0.0:
                        # two nearby crossings; the branch ends at the first one
                        sigma_star = optimize.brentq(derivative, grid[i - 1], sigma_star, xtol=1e-15)
                    logger.debug(f"Touching fold at sigma={sigma_star} (tau={tau}, H={h})")
                    return sigma_star, g_value(sigma_star, tau, cosh_h)
        if not crossings.size:
            raise NoConvergence(f"No fold of the sigma-equation found for tau={tau}, H={h}")
        i = crossings[0]
        if values[i] == 0.0:
            sigma_star = float(grid[i])
        else:
            sigma_star = optimize.brentq(derivative, grid[i - 1], grid[i], xtol=1e-15, rtol=4 * np.finfo(float).eps)
        return sigma_star, g_value(sigma_star, tau, cosh_h)

    def t_critical(self, tau: float, h: float) -> float:
        """
        Critical value of t at (τ, H).

        H = 0: t_low(τ) for τ <= 1/4, t_high(τ) = -(2/9)√τ(√τ-1)²(√τ+2) above.
        H != 0: numerically, at the first double root of 𝔍 along the branch.

        Raises:
            DomainError: τ outside (0, 1)
        """
        if not 0.0 < tau < 1.0:
            raise DomainError(f"tau must lie in (0, 1), got {tau}")
        if h == 0.0:
            return self.t_low(tau) if tau <= 0.25 else self.t_high(tau)
        return self.fold_point(tau, abs(h))[1]

    def t_critical_numeric(self, tau: float, h: float) -> float:
        """Double-root solver, used for H = 0 as an oracle of the closed forms."""
        if not 0.0 < tau < 1.0:
            raise DomainError(f"tau must lie in (0, 1), got {tau}")
        return self.fold_point(tau, abs(h))[1]

    def critical_values(self, tau: float, h: float) -> List[complex]:
        """
        Critical values G(σ_k) of G = 𝔍 + t over every complex critical point σ_k.

        As a polynomial in t, 𝓙(τ, t, cosh H) vanishes at these values,
        so |𝓙| is small wherever t is close to one of them. Besides t_cr they
        include G(1) = t_low(τ) at H = 0, which lies inside the genus-zero
        region for 1/4 < τ < (3/8)^{1/2}. A small field splits σ = 1 into four
        critical points whose values stay close to t_low.
        """
        cosh_h = math.cosh(h)
        if cosh_h == 1.0:
            # ∂𝔍/∂σ = (σ - 1)(1 - τ²(1 + σ)⁴) / (3(1 + σ)³)
            root = tau ** -0.5
            points = [1.0 + 0j] + [-1.0 + root * 1j ** k for k in range(4)]
        else:
            # numerator of ∂𝔍/∂σ over 3(1 - σ²)³
            s = Polynomial([0.0, 1.0])
            numerator = tau * tau * (1 - s ** 2) ** 4 - (1 - s) ** 4 + 4.0 * (cosh_h - 1.0) * s * (1 + s ** 2)
            points = [complex(r) for r in numerator.roots() if abs(1.0 - complex(r) ** 2) > POLE_GUARD]
        return [complex(g_value(x, tau, cosh_h)) for x in points]

    def real_critical_values(self, tau: float, h: float) -> List[float]:
        """The real members of critical_values, ascending."""
        return sorted(v.real for v in self.critical_values(tau, h) if abs(v.imag) <= ROOT_IMAG_TOL * max(1.0, abs(v)))

    def fold_sigma(self, tau: float, h: float) -> float:
        if h == 0.0:
            return min(1.0, tau ** -0.5 - 1.0)
        return self.fold_point(tau, abs(h))[0]

    # Continuation

    def _newton(self, sigma: float, t: float, tau: float, cosh_h: float) -> Tuple[float, int, bool]:
        for iteration in range(1, settings.NEWTON_MAX_ITER + 1):
            residual = g_value(sigma, tau, cosh_h) - t
            if abs(residual) < settings.NEWTON_TOL:
                return sigma, iteration - 1, True
            slope = g_prime(sigma, tau, cosh_h)
            if slope == 0.0:
                return sigma, iteration, False
            sigma -= residual / slope
        residual = g_value(sigma, tau, cosh_h) - t
        return sigma, settings.NEWTON_MAX_ITER, abs(residual) < settings.NEWTON_TOL

    def solve_sigma(self, pp: PhasePoint) -> SigmaSolution:
        """
        The analytic branch σ(τ, t, H) with σ(τ, 0, H) = 0.

        Flow:
        1. Locate the fold (σ*, t_cr) of the branch on the t < 0 side
        2. Reject targets beyond t_cr; return σ* for targets on it
        3. Continue in t from 0 with tangent predictor and Newton corrector;
           the step starts at |t|/32, halves when Newton needs more than 6
           iterations and regrows after easy steps
        4. When |∂𝔍/∂σ| drops below the detection threshold, finish with
           brentq on the bracket [σ_k, σ*]

        Args:
            pp (PhasePoint): target point, 0 < τ < 1

        Returns:
            SigmaSolution: σ, convergence flag, step count, branch-point flag

        Raises:
            DomainError: τ outside (0, 1)
            BranchPointReached: t beyond t_cr(τ, H)
            NoConvergence: continuation stalled
        """
        tau, t, h = pp.tau, pp.t, pp.h
        if not 0.0 < tau < 1.0:
            raise DomainError(f"tau must lie in (0, 1), got {tau}")
        if t == 0.0:
            return SigmaSolution(sigma=0.0, converged=True, steps=0)
        cosh_h = math.cosh(h)
        try:
            sigma_limit = None
            if t < 0.0:
                sigma_star, t_cr = self.fold_point(tau, abs(h)) if h != 0.0 else (
                    self.fold_sigma(tau, 0.0), self.t_critical(tau, 0.0))
                band = 1e-14 * max(1.0, abs(t_cr))
                if t < t_cr - band:
                    raise BranchPointReached(
                        f"t={t} lies beyond the critical value {t_cr} at tau={tau}, H={h}", t_critical=t_cr)
                if abs(t - t_cr) <= band:
                    residual = abs(g_value(sigma_star, tau, cosh_h) - t)
                    return SigmaSolution(sigma=sigma_star, converged=True, steps=0,
                                         hit_branch_point=True, residual=residual)
                sigma_limit = sigma_star

            sigma, t_now = 0.0, 0.0
            initial = t / settings.INITIAL_STEP_DIVISOR
            step = initial
            steps = 0
            while t_now != t:
                if abs(g_prime(sigma, tau, cosh_h)) < settings.BRANCH_DETECT and sigma_limit is not None:
                    return self._finish_near_fold(sigma, sigma_limit, t, tau, cosh_h, steps)
                t_next = t if abs(t - t_now) <= abs(step) else t_now + step
                guess = sigma + (t_next - t_now) / g_prime(sigma, tau, cosh_h)
                if sigma_limit is not None:
                    guess = min(guess, sigma_limit)
                candidate, iterations, ok = self._newton(guess, t_next, tau, cosh_h)
                bad = (not ok or iterations > settings.NEWTON_SLOW_ITER
                       or (sigma_limit is not None and not sigma - 1e-15 <= candidate <= sigma_limit)
                       or (t > 0.0 and not -1.0 < candidate <= sigma + 1e-15))
                if bad:
                    step /= 2.0
                    if abs(step) < 1e-15 * abs(t):
                        if sigma_limit is not None:
                            return self._finish_near_fold(sigma, sigma_limit, t, tau, cosh_h, steps)
                        raise NoConvergence(f"sigma continuation stalled at t={t_now} (tau={tau}, H={h})")
                    continue
                sigma, t_now = candidate, t_next
                steps += 1
                logger.debug(f"step {steps}: t={t_now:.6e} sigma={sigma:.15f} newton={iterations}")
                if iterations <= 2 and abs(step) < abs(initial):
                    step = min(abs(step) * 1.5, abs(initial)) * np.sign(initial)
            residual = abs(g_value(sigma, tau, cosh_h) - t)
            return SigmaSolution(sigma=sigma, converged=residual < 10 * settings.NEWTON_TOL,
                                 steps=steps, residual=residual)
        except Ising2mmError:
            raise
        except Exception as e:
            logger.exception(f"sigma continuation failed at {pp}")
            raise NoConvergence(f"sigma continuation failed: {e}")

    def _finish_near_fold(self, sigma, sigma_star, t, tau, cosh_h, steps) -> SigmaSolution:
        def f(s):
            return g_value(s, tau, cosh_h) - t

        lo, hi = sigma, sigma_star
        if f(hi) >= 0.0:
            # target within roundoff of the fold value
            return SigmaSolution(sigma=hi, converged=True, steps=steps, hit_branch_point=True,
                                 residual=abs(f(hi)))
        root = optimize.brentq(f, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)
        logger.debug(f"Finished near fold with brentq: sigma={root}")
        return SigmaSolution(sigma=root, converged=True, steps=steps + 1, residual=abs(f(root)))

    # Classification

    def classify(self, pp: PhasePoint, tol: Optional[float] = None) -> Classification:
        """
        Region label of a phase point.

        H < 0 is folded onto H > 0 (q -> 1/q) before classification; the
        returned point keeps the original sign.
        """
        tol = self.classify_tol if tol is None else tol
        tau, t, h = pp.tau, pp.t, pp.h

        def label(value: RegionLabel, t_cr: Optional[float] = None) -> Classification:
            return Classification(point=pp, label=value, t_critical=t_cr)

        if not math.isfinite(h):
            return label(RegionLabel.BOUNDARY_Q_WALL)
        if tau == 0.0:
            return label(RegionLabel.BOUNDARY_TAU0)
        if tau == 1.0:
            return label(RegionLabel.BOUNDARY_TAU1)
        if not 0.0 < tau < 1.0:
            return label(RegionLabel.OUTSIDE)
        if t == 0.0:
            return label(RegionLabel.BOUNDARY_T0)
        if t > 0.0:
            return label(RegionLabel.OUTSIDE)

        h_abs = abs(h)
        mc_tau, mc_t, _ = MULTICRITICAL
        if (abs(tau - mc_tau) <= tol * mc_tau and abs(t - mc_t) <= tol * abs(mc_t) and h_abs <= tol):
            return label(RegionLabel.MULTICRITICAL, mc_t)

        t_cr = self.t_critical(tau, h_abs)
        if abs(t - t_cr) <= tol * abs(t_cr):
            return label(self._surface_label(tau, t_cr, h_abs), t_cr)
        if t > t_cr:
            return label(RegionLabel.GENUS_ZERO_INTERIOR, t_cr)
        return label(RegionLabel.OUTSIDE, t_cr)

    def _surface_label(self, tau: float, t_cr: float, h_abs: float) -> RegionLabel:
        if h_abs == 0.0:
            return RegionLabel.LOW_TEMP_SURFACE if tau < 0.25 else RegionLabel.HIGH_TEMP_SURFACE
        sigma_star = self.fold_sigma(tau, h_abs)
        p = self.invert_phase_point(PhasePoint(tau=tau, t=t_cr, h=-h_abs), sigma=sigma_star)
        near_high = abs(p.a - 1.0) < 1e-4
        near_low = abs(p.a * p.b - 1.0) < 1e-4
        if near_high and near_low:
            return RegionLabel.GAMMA_B
        if near_high or near_low:
            return RegionLabel.HIGH_TEMP_SURFACE if near_high else RegionLabel.LOW_TEMP_SURFACE
        return RegionLabel.HIGH_TEMP_SURFACE if abs(p.a - 1.0) < abs(p.a * p.b - 1.0) else RegionLabel.LOW_TEMP_SURFACE

    # Critical surfaces

    @staticmethod
    def _check_bc(b: float, c: float) -> None:
        if not (0.0 < b <= 1.0 and 0.0 < c <= b):
            raise DomainError(f"(b, c) = ({b}, {c}) outside 0 < c <= b <= 1")

    def critical_surface_low(self, b: float, c: float) -> PhasePoint:
        """r_low(b, c), the image of a = 1/b."""
        self._check_bc(b, c)
        b2, c2 = b * b, c * c
        n1 = 2.0 * b2 * b2 * c2 + b2 + c2
        n2 = b2 * b2 + b2 * c2 + 2.0
        tau = b ** 3 / math.sqrt(n1 * n2)
        t = -b * c * (b ** 6 * c2 + (4.0 / 3.0) * b2 * c2 + 1.0) / (3.0 * n1 * n2)
        q = b * c * n2 / n1
        return PhasePoint.from_q(tau, t, q)

    def critical_surface_high(self, b: float, c: float) -> PhasePoint:
        """r_high(b, c), the image of a = 1."""
        self._check_bc(b, c)
        b2, c2 = b * b, c * c
        m1 = b2 * c2 + 2.0 * c2 + 1.0
        m2 = b2 * c2 + 2.0 * b2 + 1.0
        tau = 1.0 / math.sqrt(m1 * m2)
        t = -b * c * (4.0 * b2 * c2 + 3.0 * b2 + 3.0 * c2) / (9.0 * m1 * m2)
        q = c * m2 / (b * m1)
        return PhasePoint.from_q(tau, t, q)

    def critical_curve_b(self, c: float) -> PhasePoint:
        """γ_b(c), the image of a = b = 1."""
        if not 0.0 < c <= 1.0:
            raise DomainError(f"c = {c} outside (0, 1]")
        c2 = c * c
        tau = 1.0 / math.sqrt((3.0 * c2 + 1.0) * (c2 + 3.0))
        t = -c * (7.0 * c2 + 3.0) / (9.0 * (c2 + 3.0) * (3.0 * c2 + 1.0))
        q = c * (c2 + 3.0) / (3.0 * c2 + 1.0)
        return PhasePoint.from_q(tau, t, q)

    # Discriminant

    @staticmethod
    def _discriminant_terms(tau: float, t: float, cosh_h: float) -> np.ndarray:
        data = np.array(DISCRIMINANT_MONOMIALS, dtype=float)
        return data[:, 0] * tau ** data[:, 1] * t ** data[:, 2] * cosh_h ** data[:, 3]

    def discriminant_J(self, tau: float, t: float, cosh_h: float) -> float:
        """The degree-5 polynomial 𝓙(τ, t, C) whose zero set contains the critical surfaces."""
        return float(np.sum(self._discriminant_terms(tau, t, cosh_h)))

    def discriminant_scaled(self, tau: float, t: float, cosh_h: float) -> float:
        """|𝓙| divided by the sum of the absolute values of its monomials."""
        terms = self._discriminant_terms(tau, t, cosh_h)
        scale = float(np.sum(np.abs(terms)))
        return abs(float(np.sum(terms))) / scale if scale else 0.0

    # Inverse map

    def invert_phase_point(self, pp: PhasePoint, sigma: Optional[float] = None) -> ABCPoint:
        """
        Preimage (a, b, c) of a phase point with q <= 1.

        Flow:
        1. σ from solve_sigma unless supplied
        2. Box-bounded coordinates: a = 1 + α(1/b - 1), c = γb with α, γ in [0, 1]
        3. Seed from a coarse (α, b, γ) grid
        4. scipy least_squares on the residuals of τ, t, q and a²bc = σ

        Raises:
            DomainError: q > 1 after normalization cannot be represented
            NoConvergence: residual above 1e-8
        """
        q = pp.q
        if q > 1.0:
            pp = pp.flipped()
            q = pp.q
        if sigma is None:
            sigma = self.solve_sigma(pp).sigma
        target = np.array([pp.tau, pp.t, q, sigma])
        weights = 1.0 / np.maximum(np.abs(target), 1e-3)

        def unpack(x):
            alpha, b, gamma = x
            return 1.0 + alpha * (1.0 / b - 1.0), b, gamma * b

        def residuals(x):
            a, b, c = unpack(x)
            tau, t, q_val = abc_to_phase(a, b, c)
            return (np.array([tau, t, q_val, a * a * b * c]) - target) * weights

        axis = np.linspace(0.02, 0.98, 13)
        alpha, b, gamma = np.meshgrid(axis, np.linspace(0.05, 0.999, 13), axis, indexing="ij")
        a_grid = 1.0 + alpha * (1.0 / b - 1.0)
        c_grid = gamma * b
        tau_g, t_g, q_g = abc_to_phase(a_grid, b, c_grid)
        stacked = np.stack([tau_g, t_g, q_g, a_grid ** 2 * b * c_grid], axis=-1)
        cost = np.sum(((stacked - target) * weights) ** 2, axis=-1)
        i = np.unravel_index(np.argmin(cost), cost.shape)
        x0 = np.array([alpha[i], b[i], gamma[i]])

        result = optimize.least_squares(
            residuals, x0, bounds=([0.0, 1e-6, 1e-6], [1.0, 1.0, 1.0]),
            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000,
        )
        if np.max(np.abs(result.fun)) > 1e-8:
            raise NoConvergence(
                f"inverse map did not converge for {pp}: residual {np.max(np.abs(result.fun)):.3e}")
        a, b, c = unpack(result.x)
        logger.info(f"Inverted {pp} to (a,b,c)=({a:.12f}, {b:.12f}, {c:.12f})")
        return ABCPoint(a=float(a), b=float(b), c=float(c))
