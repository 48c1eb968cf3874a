"""
CLI Commands
============

One module per subcommand. Each module exposes `register(subparsers)`,
which adds its parser with `handler=run`, and `run(args) -> CommandOutput`.
"""
from typing import List

import numpy as np

from app.dependencies import get_phase_service
from app.exceptions import DomainError
from app.models.enums.phase import RegionLabel
from app.schemas.phase import ABCPoint, Classification, PhasePoint

def parse_range(text: str, name: str) -> List[float]:
    """
    'start:stop:count' as count evenly spaced values, both ends included.

    Raises:
        DomainError: malformed range
    """
    parts = text.split(":")
    try:
        if len(parts) != 3:
            raise ValueError("expected start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError("count must be positive")
    except ValueError as e:
        raise DomainError(f"malformed {name} '{text}': {e}", {"argument": name})
    return [float(x) for x in np.linspace(start, stop, count)]

def add_phase_arguments(parser, required: bool = True) -> None:
    parser.add_argument("--tau", type=float, required=required, help="coupling τ in (0, 1)")
    parser.add_argument("--t", type=float, required=required, help="quartic coupling, negative")
    parser.add_argument("--H", dest="h", type=float, default=0.0, help="magnetic field, q = e^H")

def add_abc_arguments(parser, required: bool = True) -> None:
    parser.add_argument("--a", type=float, required=required)
    parser.add_argument("--b", type=float, required=required)
    parser.add_argument("--c", type=float, required=required)

def abc_from(args) -> ABCPoint:
    return ABCPoint(a=args.a, b=args.b, c=args.c)

def require_genus_zero(pp: PhasePoint) -> Classification:
    """
    Classify and accept the interior or the critical surfaces.

    Raises:
        DomainError: t >= 0 or the point lies outside the genus-zero region;
            the payload carries the region label
    """
    if pp.t >= 0.0:
        raise DomainError("t must be negative", {"region": RegionLabel.OUTSIDE.value})
    classification = get_phase_service().classify(pp)
    label = classification.label
    if label != RegionLabel.GENUS_ZERO_INTERIOR and not label.is_surface:
        raise DomainError(
            f"(tau, t, H) = ({pp.tau}, {pp.t}, {pp.h}) lies outside the genus-zero region",
            {"region": label.value, "t_critical": classification.t_critical},
        )
    return classification
