"""
Spectral Curve Service
======================

Handles the rational spectral curve u -> (X(u), Y(u)) of the genus-zero phase:
- Construction from (a, b, c), branch points ±α = X(±a), ±β = X(±b)
- Sheet inversion u_j(z) of the quartic X(u) = z
- τΩ(u) = τ∫Y dX in closed form and its constants at z = ∞
- Densities of the measures μ and ν, endpoint exponents
- The implicit sextic 𝔖(X, Y) = 0
- The polar-function certificate of the lens inequalities

Region of the u-plane per sheet: sheet 1 lies outside the r₊ curve, sheets 4 and 3
inside the right and left r₋ lobes, sheet 2 everywhere else.
"""

import math
from typing import Dict, List, Optional, Tuple

import mpmath
import numpy as np
from scipy import integrate, optimize

from app.config import settings
from app.exceptions import (
    AmbiguousSheet,
    BranchPointProximity,
    CertificateFailure,
    DomainError,
    InsufficientWindow,
    Ising2mmError,
    NoConvergence,
    PoleError,
    QuadratureFailure,
)
from app.models.enums.methods import MeasureKind
from app.schemas.curve import (
    CurveData,
    EndpointFit,
    LensingCertificate,
    MeasureSample,
    OmegaCoefficients,
    OmegaConstants,
    SexticCoefficients,
)
from app.schemas.phase import ABCPoint
from app.services.phase_space import PhaseSpaceService, abc_polynomials
from app.services.series import TruncatedSeries
from utils.logger import init_logger

# Configure logger
logger = init_logger("SpectralCurveService")

CLUSTER_TOL = 1e-8
BOUNDARY_TOL = 1e-12
SIDE_OFFSET = 1e-9
HOMOTOPY_STEPS = 32
OMEGA_TOL = 1e-6
SEXTIC_POLE_GUARD = 1e-6
EXTRACT_DPS = 60
LENSING_SLACK = -1e-12
OMEGA_PROBES = (1.3 + 0.4j, 0.7 - 0.2j, 2.1 + 1.1j, -0.9 + 0.6j)


def polar_functions(theta, a: float, b: float):
    """
    r₊(θ; a, b) and r₋(θ; a, b), the polar forms of Im X(re^{iθ}) = 0.

    r₋ is NaN where sin²θ > 3/4. Accepts scalars or numpy arrays.
    """
    s2 = np.sin(theta) ** 2
    mean = 0.5 * (a * a + b * b)
    root = np.sqrt((4.0 / 3.0) * a * a * b * b * s2 + 0.25 * (a * a - b * b) ** 2)
    r_plus = np.sqrt(mean + root)
    with np.errstate(invalid="ignore"):
        r_minus = np.sqrt(np.where(mean - root >= 0, mean - root, np.nan))
    return r_plus, r_minus


def _polar_derivative(theta: float, a: float, b: float, branch: int) -> Tuple[float, float]:
    """(r, dr/dθ) on the r₊ (branch=+1) or r₋ (branch=-1) curve."""
    p = a * a * b * b
    root = math.sqrt((4.0 / 3.0) * p * math.sin(theta) ** 2 + 0.25 * (a * a - b * b) ** 2)
    r2 = 0.5 * (a * a + b * b) + branch * root
    r = math.sqrt(max(r2, 0.0))
    dr2 = branch * (2.0 / 3.0) * p * math.sin(2 * theta) / root
    return r, (dr2 / (2 * r) if r > 0 else math.inf)


def local_constants(a: float, b: float, A: float) -> Tuple[Optional[float], Optional[float]]:
    """q₁ and q̃₁, the (z ∓ α)^{3/2} and (z ∓ β)^{3/2} coefficients of τΩ; None when a = b."""
    gap = a * a - b * b
    if gap <= 0:
        return None, None
    common = 2 * (a ** 4 - b ** 4) * (1 - a ** 4 * b ** 4) / (A ** 1.5 * gap ** 1.5)
    return common * (a ** 4 - 1) / math.sqrt(a), common * (1 - b ** 4) / math.sqrt(b)


def sextic_closed_form(sigma: float, tau: float, t: float, q: float) -> Tuple[float, float, float, float]:
    """(𝔰₂(q), 𝔰₂(1/q), 𝔰₁, 𝔰₀) at a given σ."""
    s = sigma
    tau2 = tau * tau

    def s2(qq: float) -> float:
        value = (1 - 6 * s - 3 * s * s) / (27 * tau * t * (s + 1) ** 3)
        value -= (s ** 3 * tau2 + 3 * s * s * tau2 - 9 * s * tau2 - 27 * tau2 + 1) / (27 * tau * t)
        if qq != 1.0:
            bracket = ((9 * tau2 - 9) + 9 * (qq + 1) * s + (4 / qq - (28 * tau2 + 6)) * s ** 2
                       - 6 * (qq + 1) * s ** 3 + (30 * tau2 + 3) * s ** 4 + (qq + 1) * s ** 5
                       - 12 * s ** 6 * tau2 + s ** 8 * tau2)
            value -= (qq - 1) * s / (27 * tau * t * (s * s - 1) ** 3) * bracket
        return value

    s1 = -8 * (5 * s + 3) / (81 * (s + 1) ** 2 * t)
    s1 -= (s ** 6 * tau2 - 15 * s ** 4 * tau2 + 27 * s * s * tau2 - 3 * s * s + 243 * tau2 + 24 * s + 171) / (243 * t)
    if q != 1.0:
        s1 -= 4 * s ** 3 * (s * s + 3) / (81 * t * (s * s - 1) ** 2) * (q + 1 / q - 2)
    bracket = (15 * q * s ** 6 * tau2 + 9 * q * s ** 5 * t + (12 - 111 * tau2) * q * s ** 4
               + 15 * (q * q - 1.2 * t * q + 1) * s ** 3 + (177 * tau2 - 15) * q * s * s
               - 54 * (q * q - t * q / 6 + 1) * s + 81 * (1 - tau2) * q)
    s0 = -s / (19683 * t * t * tau * q * q * (s * s - 1) ** 4) * bracket ** 2
    return s2(q), s2(1 / q), s1, s0


def _mp_curve(p: ABCPoint) -> Dict[str, mpmath.mpf]:
    """Curve parameters in the current mpmath precision."""
    a, b, c = mpmath.mpf(p.a), mpmath.mpf(p.b), mpmath.mpf(p.c)
    p_c, p_b, k = abc_polynomials(a, b, c)
    tau = 1 / mpmath.sqrt(p_c * p_b)
    return {
        "A": mpmath.sqrt(3 * p_c / k),
        "B": mpmath.sqrt(3 * p_b / k),
        "tau": tau,
        "t": -a * a * b * c * k / (9 * p_c * p_b),
        "q": c * p_b / (b * p_c),
        "p": a * a + b * b,
        "P": a * a * b * b,
        "r": a * a + c * c,
        "R": a * a * c * c,
        "K": k,
    }


class SpectralCurveService:
    """Service for the spectral curve, its Ω-function and measures."""

    def __init__(self, phase_service: Optional[PhaseSpaceService] = None, quad_tol: Optional[float] = None):
        """
        Initialize service.

        Args:
            phase_service (Optional[PhaseSpaceService]): parametrization and domain checks
            quad_tol (Optional[float]): tolerance of the mass quadrature
        """
        self.phase = phase_service or PhaseSpaceService()
        self.quad_tol = quad_tol or settings.QUAD_TOL

    # Construction

    def curve_from_abc(self, p: ABCPoint) -> CurveData:
        """
        Build the curve at a point of R.

        Raises:
            DomainError: p outside R
        """
        phase = self.phase.map_abc(p)
        p_c, p_b, k = abc_polynomials(p.a, p.b, p.c)
        if k <= 0:
            raise DomainError(f"degenerate curve at (a,b,c)=({p.a}, {p.b}, {p.c})")
        A = math.sqrt(3 * p_c / k)
        B = math.sqrt(3 * p_b / k)
        a, b = p.a, p.b
        alpha = A * (2 * a + 2 * b * b / (3 * a))
        beta = A * (2 * b + 2 * a * a / (3 * b))
        logger.debug(f"curve at {p}: A={A:.6g} B={B:.6g} alpha={alpha:.6g} beta={beta:.6g}")
        return CurveData(abc=p, A=A, B=B, alpha=alpha, beta=beta, phase=phase, sigma=p.sigma)

    def stationarity_residual(self, cd: CurveData, u, side: str = "X") -> float:
        """
        |X + tqX³ - 1/X - τY| (side "X", small as u -> ∞) or
        |Y + tq⁻¹Y³ - 1/Y - τX| (side "Y", small as u -> 0), in extended precision.
        """
        with mpmath.mp.workdps(EXTRACT_DPS):
            m = _mp_curve(cd.abc)
            u = mpmath.mpmathify(u)
            x = m["A"] * (u + m["p"] / u - m["P"] / (3 * u ** 3))
            y = m["B"] * (1 / u + m["r"] * u - m["R"] * u ** 3 / 3)
            if side == "X":
                value = x + m["t"] * m["q"] * x ** 3 - 1 / x - m["tau"] * y
            elif side == "Y":
                value = y + m["t"] / m["q"] * y ** 3 - 1 / y - m["tau"] * x
            else:
                raise DomainError(f"side must be 'X' or 'Y', got {side!r}")
            return float(abs(value))

    def stationarity_decay(self, cd: CurveData, u_values: Tuple[float, float] = (1e3, 1e4)) -> float:
        """Observed decay exponent k of the X-side residual, residual ~ u^{-k}."""
        r1, r2 = (self.stationarity_residual(cd, u) for u in u_values)
        if r2 == 0.0:
            return math.inf
        return math.log(r1 / r2) / math.log(u_values[1] / u_values[0])

    # Sheets

    @staticmethod
    def sheet_of(cd: CurveData, u: complex, tol: float = BOUNDARY_TOL) -> Optional[int]:
        """Sheet containing the preimage u, None when u sits on a cut preimage."""
        r = abs(u)
        theta = float(np.angle(u))
        r_plus, r_minus = polar_functions(theta, cd.abc.a, cd.abc.b)
        if r > r_plus * (1 + tol):
            return 1
        if r >= r_plus * (1 - tol):
            return None
        if not np.isnan(r_minus):
            if r < r_minus * (1 - tol):
                return 4 if math.cos(theta) > 0 else 3
            if r <= r_minus * (1 + tol):
                return None
        return 2

    @staticmethod
    def _quartic(cd: CurveData, z: complex) -> List[complex]:
        a2, b2 = cd.abc.a ** 2, cd.abc.b ** 2
        A = cd.A
        return [3 * A, -3 * z, 3 * A * (a2 + b2), 0.0, -A * a2 * b2]

    @staticmethod
    def _polish(cd: CurveData, u: complex, z: complex, steps: int = 3) -> complex:
        for _ in range(steps):
            d = cd.dX(u)
            if d == 0:
                break
            u = u - (cd.X(u) - z) / d
        return u

    def _track(self, cd: CurveData, start: complex, end: complex, roots: List[complex]) -> List[complex]:
        """Follow the quartic roots along the segment start -> end."""
        roots = list(roots)
        for k in range(1, HOMOTOPY_STEPS + 1):
            z = start + (end - start) * k / HOMOTOPY_STEPS
            roots = [self._polish(cd, u, z, steps=6) for u in roots]
        return roots

    def invert_sheet(self, cd: CurveData, z: complex, sheet: int, side: Optional[int] = None) -> complex:
        """
        u_j(z): the root of 3Au⁴ - 3zu³ + 3A(a²+b²)u² - Aa²b² = 0 lying on sheet j.

        Args:
            cd (CurveData): curve
            z (complex): point of the X-plane
            sheet (int): 1..4
            side (Optional[int]): +1 / -1 for boundary values from above / below a cut

        Raises:
            BranchPointProximity: roots cluster (z at a branch point)
            AmbiguousSheet: z on a cut without side, or sheets not separable
        """
        if sheet not in (1, 2, 3, 4):
            raise DomainError(f"sheet must be 1..4, got {sheet}")
        z = complex(z)
        scale = max(1.0, abs(z))
        z_eval = z + 1j * side * SIDE_OFFSET * scale if side else z

        roots = [complex(u) for u in np.roots(self._quartic(cd, z_eval))]
        roots = [self._polish(cd, u, z_eval) for u in roots]
        spread = max(1.0, max(abs(u) for u in roots))
        for i in range(4):
            for j in range(i + 1, 4):
                if abs(roots[i] - roots[j]) < CLUSTER_TOL * spread:
                    raise BranchPointProximity(
                        f"quartic roots cluster at z={z}",
                        {"z": [z.real, z.imag], "roots": [[u.real, u.imag] for u in roots]},
                    )

        labels = [self.sheet_of(cd, u) for u in roots]
        if labels.count(sheet) != 1:
            if None in labels and side is None:
                raise AmbiguousSheet(f"z={z} lies on a cut; pass side=+1 or side=-1", {"z": [z.real, z.imag]})
            # continuity from a point with well separated sheets
            direction = side or (1 if z.imag >= 0 else -1)
            reference = z + 0.25j * direction * scale
            start = [complex(u) for u in np.roots(self._quartic(cd, reference))]
            ref_labels = [self.sheet_of(cd, u) for u in start]
            if sorted(ref_labels, key=lambda x: x or 0) != [1, 2, 3, 4]:
                raise AmbiguousSheet(f"cannot separate sheets near z={z}", {"z": [z.real, z.imag]})
            roots = self._track(cd, reference, z_eval, start)
            labels = ref_labels
            logger.debug(f"sheet assignment at z={z} by continuation from {reference}")

        u = roots[labels.index(sheet)]
        if side:
            u = self._polish(cd, u, z, steps=4)
        return u

    # Omega

    @staticmethod
    def omega_coefficients(cd: CurveData, source: str = "derived") -> OmegaCoefficients:
        """
        Coefficients of τΩ(u) in {u⁴, u², log u, u⁻², u⁻⁴}.

        "derived" integrates τ Y X' term by term. "printed" is the closed form as
        usually quoted; it carries a ↔ b exchanged and fails the derivative check
        unless a = b.
        """
        a2, b2, c2 = cd.abc.a ** 2, cd.abc.b ** 2, cd.abc.c ** 2
        if source == "derived":
            k = cd.phase.tau * cd.A * cd.B
            p, P, r, R = a2 + b2, a2 * b2, a2 + c2, a2 * c2
            return OmegaCoefficients(
                u4=-k * R / 12,
                u2=k * (r + R * p / 3) / 2,
                log_u=k * (1 - r * p - R * P / 3),
                um2=-k * (r * P - p) / 2,
                um4=-k * P / 4,
                source="derived",
            )
        if source == "printed":
            d = a2 * b2 * b2 * c2 + 3 * a2 * b2 + 3 * a2 * c2 + 3 * b2 * b2 + 3 * b2 * c2 - 3
            return OmegaCoefficients(
                u4=-b2 * c2 / (4 * d),
                u2=(a2 * b2 * c2 + b2 * b2 * c2 + 3 * b2 + 3 * c2) / (2 * d),
                log_u=-1.0,
                um2=-1.5 * (a2 * b2 * b2 + a2 * b2 * c2 - a2 - b2) / d,
                um4=-0.75 * a2 * b2 / d,
                source="printed",
            )
        raise DomainError(f"unknown Omega source {source!r}")

    def omega_eval(self, cd: CurveData, u: complex, coefficients: Optional[OmegaCoefficients] = None) -> complex:
        """
        τΩ(u) with the principal branch of log u.

        Raises:
            PoleError: u = 0
        """
        if u == 0:
            raise PoleError("τΩ has a pole at u = 0")
        co = coefficients or self.omega_coefficients(cd)
        u = complex(u)
        return complex(self._omega_laurent(co, u) + co.log_u * np.log(u))

    @staticmethod
    def _omega_laurent(co: OmegaCoefficients, u: complex) -> complex:
        u2 = u * u
        return co.u4 * u2 * u2 + co.u2 * u2 + co.um2 / u2 + co.um4 / (u2 * u2)

    def omega_derivative_residual(self, cd: CurveData, u: complex,
                                  coefficients: Optional[OmegaCoefficients] = None) -> float:
        """|d(τΩ)/du - τ Y X'| / |τ Y X'| with a Richardson-extrapolated central difference."""
        if u == 0:
            raise PoleError("τΩ has a pole at u = 0")
        co = coefficients or self.omega_coefficients(cd)
        u = complex(u)
        h = 1e-3 * max(1.0, abs(u))

        def central(hh):
            # log of the ratio stays clear of the branch cut of log u
            jump = self._omega_laurent(co, u + hh) - self._omega_laurent(co, u - hh)
            jump += co.log_u * np.log((u + hh) / (u - hh))
            return jump / (2 * hh)

        derivative = (4 * central(h / 2) - central(h)) / 3
        exact = cd.phase.tau * cd.Y(u) * cd.dX(u)
        return abs(derivative - exact) / abs(exact)

    def verify_omega(self, cd: CurveData) -> OmegaCoefficients:
        """
        Validate the printed closed form against d(τΩ)/du = τ Y X' and fall back to the
        derived coefficients when its residual exceeds 1e-6.
        """
        printed = self.omega_coefficients(cd, "printed")
        residual = max(self.omega_derivative_residual(cd, u, printed) for u in OMEGA_PROBES)
        if residual <= OMEGA_TOL:
            return printed.model_copy(update={"residual": residual})
        derived = self.omega_coefficients(cd, "derived")
        derived_residual = max(self.omega_derivative_residual(cd, u, derived) for u in OMEGA_PROBES)
        logger.warning(f"printed Omega form rejected at {cd.abc} (residual {residual:.3g}); using derived coefficients")
        return derived.model_copy(update={"residual": derived_residual})

    def sheet3_expansion(self, cd: CurveData, order: int = 6) -> List[float]:
        """
        Coefficients e_j of τΩ₃(z) = Σ_j e_j z^{(4-2j)/3} + (1/3) log z on z > 0, j = 0..order.
        The j = 2 entry is the constant ℓ₁.
        """
        a2, b2, c2 = cd.abc.a ** 2, cd.abc.b ** 2, cd.abc.c ** 2
        p, P = a2 + b2, a2 * b2
        co = self.omega_coefficients(cd)
        # u = v g(v²) with v³ = -AP/(3z); g³ = 1 - (3p/P)v²g² - (3/P)v⁴g⁴
        eps = TruncatedSeries.variable(order)
        g = TruncatedSeries.constant(1.0, order)
        for _ in range(order + 1):
            g2 = g * g
            inner = 1.0 - eps * g2 * (3 * p / P) - eps * eps * g2 * g2 * (3 / P)
            g = (inner.log() * (1.0 / 3.0)).exp()
        g2 = g * g
        log_g = g.log()
        series = (g2 * g2).inverse() * co.um4 + eps * g2.inverse() * co.um2 + eps * eps * log_g * co.log_u
        series = series + eps ** 3 * g2 * co.u2 + eps ** 4 * g2 * g2 * co.u4
        w = cd.A * P / 3
        out = [series[j] * w ** ((2 * j - 4) / 3) for j in range(order + 1)]
        out[2] = series[2] + co.log_u * math.log(w) / 3
        return out

    def omega_constants(self, cd: CurveData) -> OmegaConstants:
        """ℓ₀, ℓ₁, C₁, C₂ derived from the closed form of τΩ."""
        a2, b2, c2 = cd.abc.a ** 2, cd.abc.b ** 2, cd.abc.c ** 2
        k = a2 * a2 * b2 * c2 + 3 * a2 * a2 + 3 * a2 * b2 + 3 * a2 * c2 + 3 * b2 * c2 - 3
        ell0 = -(9 * a2 ** 3 * c2 + 20 * a2 * a2 * b2 * c2 + 9 * a2 * b2 * b2 * c2 + 18 * a2 * a2
                 + 18 * a2 * b2 + 18 * a2 * c2 + 18 * b2 * c2) / (6 * k) + math.log(cd.A)
        expansion = self.sheet3_expansion(cd)
        return OmegaConstants(ell0=ell0, ell1=expansion[2], C1=expansion[3], C2=expansion[4], source="derived")

    def omega_constants_printed(self, cd: CurveData) -> OmegaConstants:
        """The constants in their usually quoted closed forms, for comparison."""
        a, b, c = cd.abc.a, cd.abc.b, cd.abc.c
        a2, b2, c2 = a * a, b * b, c * c
        tau, t, q = cd.phase.tau, cd.phase.t, cd.phase.q
        k = a2 * a2 * b2 * c2 + 3 * a2 * a2 + 3 * a2 * b2 + 3 * a2 * c2 + 3 * b2 * c2 - 3
        ell0 = (9 * a2 ** 3 * c2 + 20 * a2 * a2 * b2 * c2 + 9 * a2 * b2 * b2 * c2 + 18 * a2 * a2
                + 18 * a2 * b2 + 18 * a2 * c2 + 18 * b2 * c2) / (6 * k) - math.log(cd.A)
        ell1 = (-3 * (2 * a2 ** 3 * b2 + 2 * a2 * a2 * b2 * b2 + 2 * a2 * a2 * b2 * c2 + 2 * a2 * b2 * b2 * c2
                      + a2 * a2 + 4 * a2 * b2 + b2 * b2) / (2 * a2 * b2 * k)
                - math.log(a2 * b2 * cd.A / 3) / 3)
        n1 = (3 * a ** 8 * b ** 4 * c2 + 3 * a ** 6 * b ** 6 * c2 + 3 * a ** 8 * b2 + 3 * a ** 6 * b ** 4
              + 3 * a ** 6 * b2 * c2 + 3 * a ** 4 * b ** 6 + 3 * a ** 4 * b ** 4 * c2 + 3 * a2 * b ** 6 * c2
              - a ** 6 - 9 * a ** 4 * b2 - 9 * a2 * b ** 4 - b ** 6)
        C1 = c ** 1.5 * tau ** (7 / 3) / (18 * b ** 1.5 * (-t) ** (4 / 3) * q ** (1 / 6)) * n1
        n2 = (6 * a ** 10 * b ** 4 * c2 + 9 * a ** 8 * b ** 6 * c2 + 6 * a ** 6 * b ** 8 * c2 + 2 * a ** 10 * b2
              - 6 * a ** 8 * b ** 4 + 2 * a ** 8 * b2 * c2 - 6 * a ** 6 * b ** 6 - 6 * a ** 6 * b ** 4 * c2
              + 2 * a ** 4 * b ** 8 - 6 * a ** 4 * b ** 6 * c2 + 2 * a2 * b ** 8 * c2 - a ** 8
              - 10 * a ** 6 * b2 - 12 * a ** 4 * b ** 4 - 10 * a2 * b ** 6 - b ** 8)
        C2 = -c2 * tau ** (8 / 3) / (54 * b2 * (-t) ** (5 / 3) * q ** (1 / 3)) * n2
        return OmegaConstants(ell0=ell0, ell1=ell1, C1=C1, C2=C2, source="printed")

    def _mp_sheet_root(self, cd: CurveData, m: Dict, z, sheet: int):
        roots = mpmath.polyroots([3 * m["A"], -3 * z, 3 * m["A"] * m["p"], 0, -m["A"] * m["P"]],
                                 maxsteps=200, extraprec=2 * EXTRACT_DPS)
        for u in roots:
            if self.sheet_of(cd, complex(u)) == sheet:
                return u
        raise AmbiguousSheet(f"no root on sheet {sheet} at z={float(z):.3g}")

    @staticmethod
    def _mp_omega(m: Dict, u):
        k = m["tau"] * m["A"] * m["B"]
        p, P, r, R = m["p"], m["P"], m["r"], m["R"]
        return (-k * R / 12 * u ** 4 + k * (r + R * p / 3) / 2 * u ** 2 + k * (1 - r * p - R * P / 3) * mpmath.log(u)
                - k * (r * P - p) / 2 / u ** 2 - k * P / 4 / u ** 4)

    def extract_omega_constants(self, cd: CurveData) -> OmegaConstants:
        """
        ℓ₀ from sheet 1 and ℓ₁, C₁, C₂ from sheet 3, by evaluating τΩ(u_j(z)) at large
        real z and solving for the expansion coefficients, in extended precision.
        """
        try:
            return self._extract_omega_constants(cd)
        except Ising2mmError:
            raise
        except Exception as e:
            logger.exception(f"extraction of Ω constants failed at {cd.abc}")
            raise NoConvergence(f"extraction of Ω constants failed: {e}")

    def _extract_omega_constants(self, cd: CurveData) -> OmegaConstants:
        with mpmath.mp.workdps(EXTRACT_DPS):
            m = _mp_curve(cd.abc)
            tau, t, q = m["tau"], m["t"], m["q"]

            rows, rhs = [], []
            for e in (3, 4, 5):
                z = mpmath.mpf(10) ** e
                u = self._mp_sheet_root(cd, m, z, 1)
                value = mpmath.re(self._mp_omega(m, u)) - (t * q / 4 * z ** 4 + z ** 2 / 2 - mpmath.log(z))
                rows.append([1, z ** -2, z ** -4])
                rhs.append(value)
            ell0 = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(rhs))[0]

            lead = -mpmath.mpf(3) / 4 * tau ** (mpmath.mpf(4) / 3) / (-t / q) ** (mpmath.mpf(1) / 3)
            sub = -tau ** (mpmath.mpf(2) / 3) / (2 * (-t / q) ** (mpmath.mpf(2) / 3))
            rows, rhs = [], []
            for e in (4, 5, 6, 7, 8):
                z = mpmath.mpf(10) ** e
                u = self._mp_sheet_root(cd, m, z, 3)
                x = z ** (-mpmath.mpf(2) / 3)
                value = mpmath.re(self._mp_omega(m, u)) - (lead / x ** 2 + sub / x + mpmath.log(z) / 3)
                rows.append([x ** j for j in range(5)])
                rhs.append(value)
            sol = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(rhs))
            return OmegaConstants(ell0=float(ell0), ell1=float(sol[0]), C1=float(sol[1]), C2=float(sol[2]),
                                  source="extracted")

    # Measures

    @staticmethod
    def _upper_theta(which: MeasureKind, theta: float) -> float:
        """Map θ into the upper half plane by conjugation, checking the admissible ranges."""
        eps = 1e-15
        if which == MeasureKind.MU:
            if not (-math.pi < theta < math.pi) or abs(theta) < eps:
                raise DomainError(f"theta={theta} outside (-π, 0) ∪ (0, π)")
            return abs(theta)
        if (-math.pi / 3 < theta < math.pi / 3) and abs(theta) > eps:
            return abs(theta)
        if 2 * math.pi / 3 < theta < 4 * math.pi / 3 and abs(theta - math.pi) > eps:
            return theta if theta < math.pi else 2 * math.pi - theta
        raise DomainError(f"theta={theta} outside the r₋ ranges")

    def _measure_point(self, cd: CurveData, which: MeasureKind, theta: float) -> Tuple[complex, complex]:
        branch = 1 if which == MeasureKind.MU else -1
        r, dr = _polar_derivative(theta, cd.abc.a, cd.abc.b, branch)
        e = complex(math.cos(theta), math.sin(theta))
        return r * e, (dr + 1j * r) * e

    def measure_density(self, cd: CurveData, which: MeasureKind, theta: float) -> MeasureSample:
        """
        Density (τ/π)|Im Y(u)| at s = X(u), u = r±(θ) e^{iθ}.

        Raises:
            DomainError: θ outside the range of the requested polar curve
        """
        which = MeasureKind(which)
        theta_up = self._upper_theta(which, theta)
        u, _ = self._measure_point(cd, which, theta_up)
        s = cd.X(u).real
        density = cd.phase.tau / math.pi * abs(cd.Y(u).imag)
        return MeasureSample(s=s, density=density, which=which, theta=theta)

    def measure_table(self, cd: CurveData, which: MeasureKind, n: int = 64) -> List[MeasureSample]:
        """Samples over the upper-half-plane arcs, ordered by s."""
        which = MeasureKind(which)
        if which == MeasureKind.MU:
            thetas = [math.pi * (k + 0.5) / n for k in range(n)]
        else:
            half = n // 2
            right = [math.pi / 3 * (k + 0.5) / half for k in range(half)]
            thetas = right + [math.pi - x for x in right]
        samples = [self.measure_density(cd, which, th) for th in thetas]
        return sorted(samples, key=lambda m: m.s)

    def mu_mass(self, cd: CurveData) -> float:
        """∫ dμ = ∫₀^π (τ/π)|Im Y| |d Re X(u(θ))/dθ| dθ along the upper r₊ arc."""
        tau = cd.phase.tau

        def integrand(theta):
            u, du = self._measure_point(cd, MeasureKind.MU, theta)
            return tau / math.pi * abs(cd.Y(u).imag) * abs((cd.dX(u) * du).real)

        try:
            value, err = integrate.quad(integrand, 0.0, math.pi, epsabs=self.quad_tol, epsrel=self.quad_tol, limit=400)
        except Ising2mmError:
            raise
        except Exception as e:
            logger.exception(f"mu mass quadrature failed at {cd.abc}")
            raise QuadratureFailure(f"mu mass quadrature failed: {e}")
        logger.info(f"mu mass at {cd.abc}: {value:.12g} (quad error {err:.2g})")
        return value

    def endpoint_exponent(
            self,
            cd: CurveData,
            which: MeasureKind,
            end: int = 1,
            window: Tuple[float, float] = (1e-6, 1e-3),
            points: int = 40
        ) -> EndpointFit:
        """
        Least-squares slope of log density against log|s - s₀| near s₀ = ±α (μ) or ±β (ν).

        The window is relative to β - α, or to α when the branch points coincide.

        Raises:
            InsufficientWindow: α and β too close for the window to fit between them
        """
        which = MeasureKind(which)
        gap = cd.beta - cd.alpha
        if gap <= 1e-12 * cd.alpha:
            scale = cd.alpha
        elif gap < 1e-7 * cd.alpha:
            raise InsufficientWindow(f"β - α = {gap:.3g} leaves no room for the fit window")
        else:
            scale = gap

        if which == MeasureKind.MU:
            s0, theta_max = cd.alpha, math.pi / 2
        else:
            s0, theta_max = cd.beta, math.pi / 3 * (1 - 1e-9)

        def distance(theta):
            u, _ = self._measure_point(cd, which, theta)
            return abs(cd.X(u).real - s0)

        targets = np.geomspace(window[0] * scale, window[1] * scale, points)
        xs, ys = [], []
        for target in targets:
            try:
                theta = optimize.brentq(lambda th: distance(th) - target, 1e-12, theta_max, xtol=1e-15, rtol=1e-14)
            except ValueError as exc:
                raise InsufficientWindow(f"cannot reach |s - s0| = {target:.3g}: {exc}")
            # the -s₀ endpoint mirrors u -> -ū, which leaves the density unchanged
            sample = self.measure_density(cd, which, theta)
            if sample.density <= 0:
                continue
            xs.append(math.log(target))
            ys.append(math.log(sample.density))
        if len(xs) < 3:
            raise InsufficientWindow("not enough positive density samples in the window")
        slope = float(np.polyfit(xs, ys, 1)[0])
        return EndpointFit(which=which, end=end * s0, exponent=slope,
                           window=[window[0] * scale, window[1] * scale], points=len(xs))

    # Sextic

    def _fixed_monomials(self, cd: CurveData) -> Dict[str, float]:
        tau, t, q = cd.phase.tau, cd.phase.t, cd.phase.q
        return {"X4": tau * q, "Y4": tau / q, "X3Y3": -t, "X3Y": -q, "XY3": -1 / q, "X2Y2": t / tau}

    @staticmethod
    def _monomials(X, Y) -> Dict[str, complex]:
        return {"X4": X ** 4, "Y4": Y ** 4, "X3Y3": X ** 3 * Y ** 3, "X3Y": X ** 3 * Y, "XY3": X * Y ** 3,
                "X2Y2": X * X * Y * Y, "X2": X * X, "Y2": Y * Y, "XY": X * Y, "1": 1.0}

    def sextic_fit(self, cd: CurveData) -> SexticCoefficients:
        """Least-squares 𝔰₂(q), 𝔰₂(1/q), 𝔰₁, 𝔰₀ from real samples of the curve."""
        fixed = self._fixed_monomials(cd)
        us = np.concatenate([np.geomspace(0.35, 2.8, 12), -np.geomspace(0.45, 2.2, 6)])
        rows, rhs = [], []
        for u in us:
            mono = self._monomials(cd.X(u), cd.Y(u))
            rows.append([mono["X2"], mono["Y2"], mono["XY"], 1.0])
            rhs.append(-sum(fixed[k] * mono[k] for k in fixed))
        rows = np.array(rows)
        norms = np.linalg.norm(rows, axis=0)
        sol, *_ = np.linalg.lstsq(rows / norms, np.array(rhs), rcond=None)
        sol = sol / norms
        return SexticCoefficients(s2q=sol[0], s2qi=sol[1], s1=sol[2], s0=sol[3], fixed=fixed, source="fit")

    def sextic_coefficients(self, cd: CurveData) -> SexticCoefficients:
        """Closed-form coefficients, or the fit where σ -> 1 makes them 0/0."""
        if abs(cd.sigma * cd.sigma - 1) < SEXTIC_POLE_GUARD:
            return self.sextic_fit(cd)
        s2q, s2qi, s1, s0 = sextic_closed_form(cd.sigma, cd.phase.tau, cd.phase.t, cd.phase.q)
        return SexticCoefficients(s2q=s2q, s2qi=s2qi, s1=s1, s0=s0, fixed=self._fixed_monomials(cd))

    def sextic_residual(self, cd: CurveData, u: complex, coefficients: Optional[SexticCoefficients] = None) -> float:
        """|𝔖(X(u), Y(u))| over the largest monomial magnitude."""
        co = coefficients or self.sextic_coefficients(cd)
        mono = self._monomials(cd.X(u), cd.Y(u))
        weights = dict(co.fixed, X2=co.s2q, Y2=co.s2qi, XY=co.s1, **{"1": co.s0})
        terms = [weights[k] * mono[k] for k in weights]
        return abs(sum(terms)) / max(abs(x) for x in terms)

    # Lens inequalities

    def check_lensing(self, p: ABCPoint, n_theta: int = 256) -> LensingCertificate:
        """
        Certify the polar-function inequalities on a θ-grid:
        r₊(θ;a,b) ≥ a, r₋(θ;a,b) ≤ b, r±(θ;a,b) ≥ r±(θ;a,c), r₊² ≥ 1, r₋² ≤ 1, r₊r₋ ≤ 1,
        and q₁, q̃₁ ≥ 0.

        Raises:
            CertificateFailure: with the violating (θ, inequality) witness
        """
        self.phase.map_abc(p)
        a, b, c = p.a, p.b, p.c
        theta = np.pi * (np.arange(n_theta) + 0.5) / n_theta
        rp_b, rm_b = polar_functions(theta, a, b)
        rp_c, rm_c = polar_functions(theta, a, c)
        has_minus = ~np.isnan(rm_b)

        slacks = {
            "r_plus_ge_a": rp_b - a,
            "r_minus_le_b": np.where(has_minus, b - rm_b, np.inf),
            "r_plus_monotone": rp_b - rp_c,
            "r_minus_monotone": np.where(has_minus, rm_b - rm_c, np.inf),
            "r_plus_sq_ge_1": rp_b ** 2 - 1,
            "r_minus_sq_le_1": np.where(has_minus, 1 - rm_b ** 2, np.inf),
            "r_plus_r_minus_le_1": np.where(has_minus, 1 - rp_b * rm_b, np.inf),
        }
        margins = {}
        for name, slack in slacks.items():
            k = int(np.argmin(slack))
            margins[name] = float(slack[k])
            if slack[k] < LENSING_SLACK:
                raise CertificateFailure(
                    f"lens inequality {name} fails at theta={theta[k]:.6g}",
                    {"a": a, "b": b, "c": c, "theta": float(theta[k]), "inequality": name, "slack": float(slack[k])},
                )

        p_c, _, k_poly = abc_polynomials(a, b, c)
        A = math.sqrt(3 * p_c / k_poly)
        q1, q1_tilde = local_constants(a, b, A)
        for name, value in (("q1", q1), ("q1_tilde", q1_tilde)):
            if value is not None and value < LENSING_SLACK:
                raise CertificateFailure(f"local constant {name} = {value:.3g} is negative",
                                         {"a": a, "b": b, "c": c, "inequality": name, "slack": value})
        return LensingCertificate(abc=p, n_theta=n_theta, margins=margins, q1=q1, q1_tilde=q1_tilde)
