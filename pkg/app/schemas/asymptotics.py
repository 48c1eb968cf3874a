"""
Asymptotics Schemas
=========================

Includes:
- AsymptoticEstimate: exact vs asymptotic σ coefficient at one order
- RatioEstimate: radius of convergence from consecutive coefficients
- AiryCoefficients: the quantities entering the uniform Airy formula
"""
from typing import List
from pydantic import BaseModel
from app.models.enums.phase import Regime

class AsymptoticEstimate(BaseModel):
    """
    Fields:
        tau (float): coupling τ (H = 0).
        V (int): order.
        exact (float): contour-normalized coefficient V [t^V] σ(t) = σ_V/(V-1)!.
        estimate (float): asymptotic value of the same quantity.
        regime (Regime): formula used.
        ratio (float): estimate / exact.
        corrections (int): number of 1/V correction terms included.
    """
    tau: float
    V: int
    exact: float
    estimate: float
    regime: Regime
    ratio: float
    corrections: int = 0

class RatioEstimate(BaseModel):
    """
    Fields:
        tau (float): coupling τ.
        V (int): order of the last ratio used.
        raw (float): c_V / c_{V+1}.
        extrapolated (float): V r_V - (V-1) r_{V-1}, linear in 1/V.
        t_critical (float): critical value at (τ, 0).
        relative_error (float): |extrapolated / t_critical - 1|.
    """
    tau: float
    V: int
    raw: float
    extrapolated: float
    t_critical: float
    relative_error: float

class AiryCoefficients(BaseModel):
    """
    Fields:
        tau (float): coupling τ.
        s (float): s(τ) >= 0, vanishing at τ = 1/4.
        C (float): -(1/2) log(t_low t_high).
        a0 (float): coefficient of V^{-1/3} Ai.
        b0 (float): coefficient of V^{-2/3} Ai'.
        saddle_slopes (List[float]): dζ/du at the images of ζ = 1 and ζ = τ^{-1/2} - 1.
    """
    tau: float
    s: float
    C: float
    a0: float
    b0: float
    saddle_slopes: List[float]
