"""
Phase Space Enums
=========================

Labels attached to points of the (τ, t, H) phase space.

Includes:
- Region labels
- Asymptotic regimes of the σ coefficients
"""
from enum import Enum

class RegionLabel(str, Enum):
    """
    Classification of a phase point.

    Values:
        GENUS_ZERO_INTERIOR: 0 < τ < 1 and t_cr(τ, H) < t < 0.
        LOW_TEMP_SURFACE: On the low-temperature critical surface (a = 1/b).
        HIGH_TEMP_SURFACE: On the high-temperature critical surface (a = 1).
        GAMMA_B: On the curve where both surfaces meet (a = 1, b = 1).
        MULTICRITICAL: Within tolerance of (1/4, -5/72, 0).
        OUTSIDE: Beyond the critical value, or t > 0.
        BOUNDARY_T0: t = 0.
        BOUNDARY_TAU0: τ = 0.
        BOUNDARY_TAU1: τ = 1.
        BOUNDARY_Q_WALL: q = 0 or q infinite (H not finite).
    """
    GENUS_ZERO_INTERIOR = "genus_zero_interior"
    LOW_TEMP_SURFACE = "low_temp_surface"
    HIGH_TEMP_SURFACE = "high_temp_surface"
    GAMMA_B = "gamma_b"
    MULTICRITICAL = "multicritical"
    OUTSIDE = "outside"
    BOUNDARY_T0 = "boundary_t0"
    BOUNDARY_TAU0 = "boundary_tau0"
    BOUNDARY_TAU1 = "boundary_tau1"
    BOUNDARY_Q_WALL = "boundary_q_wall"

    @property
    def is_surface(self) -> bool:
        return self in (
            RegionLabel.LOW_TEMP_SURFACE,
            RegionLabel.HIGH_TEMP_SURFACE,
            RegionLabel.GAMMA_B,
            RegionLabel.MULTICRITICAL,
        )

class Regime(str, Enum):
    """
    Large-order regime of the σ coefficients at H = 0.

    Values:
        LOW_TEMP: τ < 1/4, dominant saddle ζ = 1.
        HIGH_TEMP: τ > 1/4, dominant saddle ζ = τ^(-1/2) - 1.
        AIRY_UNIFORM: Near τ = 1/4 where the two saddles coalesce.
    """
    LOW_TEMP = "low_temp"
    HIGH_TEMP = "high_temp"
    AIRY_UNIFORM = "airy_uniform"
