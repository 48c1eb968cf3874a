"""
Series Schemas
=========================

Includes:
- SigmaCoefficients: σ_V = V! [t^V] σ(t) by two independent routes
"""
from typing import List
from pydantic import BaseModel

class SigmaCoefficients(BaseModel):
    """
    Fields:
        tau (float): coupling τ.
        h (float): magnetic field H.
        order (int): number of coefficients.
        by_reversion (List[float]): σ_1..σ_N from series reversion.
        by_lagrange (List[float]): σ_1..σ_N from (σ/G)^V extraction.
        max_relative_discrepancy (float): worst relative gap between the two lists.
    """
    tau: float
    h: float
    order: int
    by_reversion: List[float]
    by_lagrange: List[float]
    max_relative_discrepancy: float
