"""
Phase Space Schemas
=========================

Defines the data structures for the phase space:
1. Parameter points (a, b, c) of the region R
2. Physical points (τ, t, H)
3. Results of the σ continuation and of classification

Includes:
- ABCPoint
- PhasePoint
- SigmaSolution
- Classification
"""
import math
from typing import Optional
from pydantic import BaseModel, ConfigDict
from app.models.enums.phase import RegionLabel

class ABCPoint(BaseModel):
    """
    A point of the parameter region R = {1 <= a <= 1/b, 0 < c <= b <= 1}.

    Fields:
        a (float): first parameter, 1 <= a <= 1/b.
        b (float): second parameter, 0 < b <= 1.
        c (float): third parameter, 0 < c <= b.
    """
    model_config = ConfigDict(frozen=True)

    a: float
    b: float
    c: float

    @property
    def sigma(self) -> float:
        """σ = a²bc, the value of the analytic σ branch at the image point."""
        return self.a * self.a * self.b * self.c

    def in_region(self, tol: float = 1e-12) -> bool:
        a, b, c = self.a, self.b, self.c
        return (0 < b <= 1 + tol) and (1 - tol <= a <= 1 / b + tol) and (0 < c <= b + tol)

    def is_interior(self) -> bool:
        a, b, c = self.a, self.b, self.c
        return 0 < b < 1 and 1 < a < 1 / b and 0 < c < b

class PhasePoint(BaseModel):
    """
    Physical coordinates of the 2-matrix model.

    Fields:
        tau (float): coupling τ, 0 < τ < 1 in the physical range.
        t (float): quartic coupling, negative in the genus-zero region.
        h (float): magnetic field H; q = e^H.
    """
    model_config = ConfigDict(frozen=True)

    tau: float
    t: float
    h: float = 0.0

    @property
    def q(self) -> float:
        return math.exp(self.h)

    @property
    def cosh_h(self) -> float:
        return math.cosh(self.h)

    @classmethod
    def from_q(cls, tau: float, t: float, q: float) -> "PhasePoint":
        return cls(tau=tau, t=t, h=math.log(q))

    def flipped(self) -> "PhasePoint":
        """The H -> -H partner (q -> 1/q)."""
        return PhasePoint(tau=self.tau, t=self.t, h=-self.h)

class SigmaSolution(BaseModel):
    """
    Result of the σ continuation.

    Fields:
        sigma (float): value of the analytic branch at the target t.
        converged (bool): Newton residual below tolerance at the target.
        steps (int): number of accepted continuation steps.
        hit_branch_point (bool): target lies on the fold (within tolerance).
        residual (float): |𝔍(σ)| at the returned σ.
    """
    sigma: float
    converged: bool
    steps: int
    hit_branch_point: bool = False
    residual: float = 0.0

class Classification(BaseModel):
    """
    Region classification of a phase point.

    Fields:
        point (PhasePoint): the point as supplied (original H sign).
        label (RegionLabel): assigned region.
        t_critical (Optional[float]): critical value at (τ, |H|) when defined.
    """
    point: PhasePoint
    label: RegionLabel
    t_critical: Optional[float] = None
