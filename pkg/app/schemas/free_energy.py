"""
Free Energy Schemas
=========================

Defines the data structures returned by the free energy service:
1. Values of F(τ, t, H) with the route that produced them
2. Planar limits of the recursion coefficients
3. Series coefficients of F in t and the decoupling checks

Includes:
- FreeEnergyResult
- PlanarCoefficients
- FreeEnergySeries
- DecouplingCheck
"""
from typing import List, Optional
from pydantic import BaseModel
from app.models.enums.methods import FreeEnergyMethod
from app.schemas.phase import PhasePoint

class FreeEnergyResult(BaseModel):
    """
    Fields:
        point (PhasePoint): where F was evaluated.
        value (float): F(τ, t, H).
        method (FreeEnergyMethod): quadrature route.
        quad_error_estimate (float): absolute error estimate reported by the quadrature.
        sigma_used (float): σ at the point (from the continuation, or -3t f(1)/τ).
    """
    point: PhasePoint
    value: float
    method: FreeEnergyMethod
    quad_error_estimate: float
    sigma_used: float

class PlanarCoefficients(BaseModel):
    """
    Planar limits of the recursion coefficients at a given f.

    Fields:
        f, R, S, Rt, St (float): f, R, S, R̃, S̃.
        lambda_c (float): λ recovered from the X-side relation.
        lambda_d (float): λ recovered from the Y-side relation.
        string_residual (float): max residual of τR = f(1+3te^{-H}R̃) and τR̃ = f(1+3te^{H}R).
    """
    f: float
    R: float
    S: float
    Rt: float
    St: float
    lambda_c: float
    lambda_d: float
    string_residual: float

class FreeEnergySeries(BaseModel):
    """
    Taylor coefficients of F in t at fixed (τ, H).

    Fields:
        tau (float): coupling τ.
        h (float): magnetic field H.
        order (int): highest power of t.
        coefficients (List[float]): [t^0] .. [t^order] from the σ-series closed form.
        coefficients_log_route (List[float]): same coefficients from log ψ.
        reference (List[float]): the closed-form orders 1..3.
        max_relative_discrepancy (float): worst gap between the two routes.
        exact (Optional[List[str]]): rational coefficients as strings in exact mode.
    """
    tau: float
    h: float
    order: int
    coefficients: List[float]
    coefficients_log_route: List[float]
    reference: List[float]
    max_relative_discrepancy: float
    exact: Optional[List[str]] = None

class DecouplingCheck(BaseModel):
    """
    Comparison of F against the quartic one-matrix free energy.

    Fields:
        side (str): "low" (τ -> 0) or "high" (τ -> 1).
        tau (float): τ used for the limit.
        t (float): one-matrix coupling.
        value (float): F at the rescaled point.
        reference (float): one-matrix prediction.
        difference (float): |value - reference|.
    """
    side: str
    tau: float
    t: float
    value: float
    reference: float
    difference: float
