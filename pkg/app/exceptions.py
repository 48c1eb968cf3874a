"""
Domain Errors
=============

Every failure raised by the services derives from Ising2mmError. Each error
carries a human readable `detail`, the process `exit_code` the CLI maps it to
and an optional machine readable `payload` (witnesses, region labels, ...).

Exit codes:
    1: numerical failure or failed certificate
    2: domain or usage error
"""
from typing import Any, Dict, Optional

class Ising2mmError(Exception):
    """Base error with detail, exit code and payload."""
    exit_code: int = 1

    def __init__(self, detail: str, payload: Optional[Dict[str, Any]] = None):
        super().__init__(detail)
        self.detail = detail
        self.payload = payload or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "detail": self.detail, **self.payload}

class DomainError(Ising2mmError):
    """Inputs outside the admissible region."""
    exit_code = 2

class PoleError(DomainError):
    """Evaluation too close to a pole of a rational function."""

class BranchPointReached(Ising2mmError):
    """Continuation in t met the critical value before reaching the target."""
    exit_code = 2

    def __init__(self, detail: str, t_critical: float, payload: Optional[Dict[str, Any]] = None):
        super().__init__(detail, {"t_critical": t_critical, **(payload or {})})
        self.t_critical = t_critical

class NoConvergence(Ising2mmError):
    exit_code = 1

class SingularReversion(DomainError):
    """Series reversion requested with vanishing linear coefficient."""

class QuadratureFailure(Ising2mmError):
    exit_code = 1

class ContinuationFailure(Ising2mmError):
    """The f(λ) branch folded before λ = 1."""
    exit_code = 1

class CapExceeded(DomainError):
    """Requested enumeration size beyond the configured cap."""

class CertificateFailure(Ising2mmError):
    exit_code = 1

    def __init__(self, detail: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(detail, {"witness": witness or {}})
        self.witness = witness or {}

class BranchPointProximity(Ising2mmError):
    exit_code = 1

class AmbiguousSheet(Ising2mmError):
    exit_code = 1

class InsufficientWindow(Ising2mmError):
    exit_code = 1

class GuardBand(DomainError):
    """Saddle formulas requested too close to τ = 1/4."""

class EvaluationUnstable(Ising2mmError):
    exit_code = 1

class RangeError(DomainError):
    """Argument outside the supported range of a special function."""
