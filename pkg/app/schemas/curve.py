"""
Spectral Curve Schemas
=========================

Defines the data structures of the rational spectral curve:
1. The curve itself, X(u) and Y(u) with their scales and branch points
2. The closed form of τΩ(u) and its large-z constants
3. Coefficients of the implicit sextic 𝔖(X, Y) = 0
4. Measure samples and the lensing certificate

Includes:
- CurveData
- OmegaCoefficients
- OmegaConstants
- SexticCoefficients
- MeasureSample
- EndpointFit
- LensingCertificate
"""
from typing import Dict, List, Optional
from pydantic import BaseModel, ConfigDict
from app.models.enums.methods import MeasureKind
from app.schemas.phase import ABCPoint, PhasePoint

class CurveData(BaseModel):
    """
    X(u) = A(u + (a²+b²)/u - a²b²/(3u³)), Y(u) = B(1/u + (a²+c²)u - a²c²u³/3).

    Fields:
        abc (ABCPoint): parameters.
        A (float): scale of X.
        B (float): scale of Y, A(a, c, b).
        alpha (float): X(a), endpoint of the μ support.
        beta (float): X(b), endpoint of the ν support.
        phase (PhasePoint): image (τ, t, H) of abc.
        sigma (float): a²bc.
    """
    model_config = ConfigDict(frozen=True)

    abc: ABCPoint
    A: float
    B: float
    alpha: float
    beta: float
    phase: PhasePoint
    sigma: float

    def X(self, u):
        a2, b2 = self.abc.a ** 2, self.abc.b ** 2
        return self.A * (u + (a2 + b2) / u - a2 * b2 / (3 * u ** 3))

    def Y(self, u):
        a2, c2 = self.abc.a ** 2, self.abc.c ** 2
        return self.B * (1 / u + (a2 + c2) * u - a2 * c2 * u ** 3 / 3)

    def dX(self, u):
        """X'(u) = A(u² - a²)(u² - b²)/u⁴."""
        a2, b2 = self.abc.a ** 2, self.abc.b ** 2
        return self.A * (u * u - a2) * (u * u - b2) / u ** 4

    def dY(self, u):
        a2, c2 = self.abc.a ** 2, self.abc.c ** 2
        return self.B * (-1 / u ** 2 + (a2 + c2) - a2 * c2 * u * u)

class OmegaCoefficients(BaseModel):
    """
    τΩ(u) = u4·u⁴ + u2·u² + log_u·log u + um2·u⁻² + um4·u⁻⁴.

    Fields:
        source (str): "derived" (integrated from τ Y X') or "printed".
        residual (float): relative mismatch of d(τΩ)/du against τ Y X'.
    """
    u4: float
    u2: float
    log_u: float
    um2: float
    um4: float
    source: str = "derived"
    residual: Optional[float] = None

class OmegaConstants(BaseModel):
    """
    Constants of τΩ_j(z) at z = ∞.

    Fields:
        ell0 (float): constant term on sheet 1.
        ell1 (float): constant term on sheet 3.
        C1 (float): coefficient of z^(-2/3) on sheet 3.
        C2 (float): coefficient of z^(-4/3) on sheet 3.
        source (str): "derived", "printed" or "extracted".
    """
    ell0: float
    ell1: float
    C1: float
    C2: float
    source: str = "derived"

class SexticCoefficients(BaseModel):
    """
    𝔖(X,Y) = τqX⁴ + τq⁻¹Y⁴ - tX³Y³ - qX³Y - q⁻¹Y³X + tτ⁻¹X²Y² + s2q X² + s2qi Y² + s1 XY + s0.

    Fields:
        fixed (Dict[str, float]): the six leading monomial coefficients.
        source (str): "closed-form" or "fit" (used where σ -> 1 makes the closed form 0/0).
    """
    s2q: float
    s2qi: float
    s1: float
    s0: float
    fixed: Dict[str, float]
    source: str = "closed-form"

class MeasureSample(BaseModel):
    s: float
    density: float
    which: MeasureKind
    theta: float

class EndpointFit(BaseModel):
    """
    Fields:
        which (MeasureKind): measure.
        end (float): endpoint s_0.
        exponent (float): least-squares slope of log density vs log|s - s_0|.
        window (List[float]): |s - s_0| range of the fit.
        points (int): number of samples used.
    """
    which: MeasureKind
    end: float
    exponent: float
    window: List[float]
    points: int

class LensingCertificate(BaseModel):
    """
    Fields:
        abc (ABCPoint): certified point.
        n_theta (int): grid size.
        margins (Dict[str, float]): smallest slack of each inequality over the grid.
        q1 (Optional[float]): local constant at ±α, None when a = b.
        q1_tilde (Optional[float]): local constant at ±β, None when a = b.
    """
    abc: ABCPoint
    n_theta: int
    margins: Dict[str, float]
    q1: Optional[float] = None
    q1_tilde: Optional[float] = None
    passed: bool = True
