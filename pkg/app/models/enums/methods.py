"""
Method and Output Enums
=========================

Includes:
- Free energy evaluation methods
- Measure kinds on the spectral curve
- CLI output formats, check suites and curve emit targets
"""
from enum import Enum

class FreeEnergyMethod(str, Enum):
    """
    Values:
        U_INTEGRAL: Integral of λ(u) over u in [0, σ].
        LAMBDA_INTEGRAL: Integral over λ in [0, 1] of the planar f(λ).
    """
    U_INTEGRAL = "uv"
    LAMBDA_INTEGRAL = "lambda"

class MeasureKind(str, Enum):
    """
    Values:
        MU: Limiting zero distribution, supported on [-α, α] (image of the r₊ curve).
        NU: Auxiliary measure, supported on |s| >= β (image of the r₋ curve).
    """
    MU = "mu"
    NU = "nu"

class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    TABLE = "table"

class CheckSuite(str, Enum):
    """
    Values:
        LENSING: Polar-function inequalities on sampled (a,b,c).
        SEXTIC: Vanishing of the implicit curve on X(u), Y(u).
        DISCRIMINANT: Vanishing of the discriminant on critical surfaces.
        ROUNDTRIP: σ continuation against a²bc.
        SERIES: Wick enumeration against the free energy series.
        ALL: Every suite above.
    """
    LENSING = "lensing"
    SEXTIC = "sextic"
    DISCRIMINANT = "discriminant"
    ROUNDTRIP = "roundtrip"
    SERIES = "series"
    ALL = "all"

class CurveEmit(str, Enum):
    BRANCH_POINTS = "branch-points"
    MEASURES = "measures"
    SEXTIC_RESIDUAL = "sextic-residual"
    OMEGA_CONSTANTS = "omega-constants"
