"""
curve
=====

Spectral curve data at a point (a, b, c) of R:
- branch-points: scales A, B, branch points α, β and the stationarity check
- measures: μ and ν density tables, μ mass and endpoint exponents
- sextic-residual: 𝔖 coefficients and scaled residuals on the sample circles
- omega-constants: ℓ₀, ℓ₁, C₁, C₂ derived, printed and extracted
"""
from app.cli.commands import abc_from, add_abc_arguments
from app.cli.output import CommandOutput
from app.dependencies import get_curve_service
from app.exceptions import Ising2mmError
from app.models.enums.methods import CurveEmit, MeasureKind
from app.services.checks import sextic_sample_points
from app.services.spectral_curve import local_constants
from utils.logger import init_logger

# Configure logger
logger = init_logger("CurveCommand")

def register(subparsers) -> None:
    parser = subparsers.add_parser("curve", help="spectral curve data at (a, b, c)")
    add_abc_arguments(parser)
    parser.add_argument("--emit", choices=[e.value for e in CurveEmit], default=CurveEmit.BRANCH_POINTS.value)
    parser.add_argument("--points", type=int, default=64, help="samples per measure table")
    parser.set_defaults(handler=run)

def _branch_points(service, cd) -> CommandOutput:
    q1, q1_tilde = local_constants(cd.abc.a, cd.abc.b, cd.A)
    return CommandOutput(payload={
        **cd.abc.model_dump(),
        "tau": cd.phase.tau,
        "t": cd.phase.t,
        "H": cd.phase.h,
        "sigma": cd.sigma,
        "A": cd.A,
        "B": cd.B,
        "alpha": cd.alpha,
        "beta": cd.beta,
        "stationarity_decay": service.stationarity_decay(cd),
        "q1": q1,
        "q1_tilde": q1_tilde,
    })

def _measures(service, cd, points: int) -> CommandOutput:
    rows = []
    exponents = {}
    for which in MeasureKind:
        for sample in service.measure_table(cd, which, points):
            rows.append({"s": sample.s, "density": sample.density, "which": which.value, **cd.abc.model_dump()})
        try:
            exponents[which.value] = service.endpoint_exponent(cd, which).exponent
        except Ising2mmError as e:
            logger.warning(f"no {which.value} endpoint exponent at {cd.abc}: {e.detail}")
            exponents[which.value] = None
    payload = {**cd.abc.model_dump(), "mu_mass": service.mu_mass(cd), "exponents": exponents, "rows": rows}
    return CommandOutput(payload=payload, rows=rows, fieldnames=["s", "density", "which", "a", "b", "c"])

def _sextic(service, cd) -> CommandOutput:
    coefficients = service.sextic_coefficients(cd)
    rows = []
    for u in sextic_sample_points():
        rows.append({"u_re": u.real, "u_im": u.imag, "residual": service.sextic_residual(cd, u, coefficients)})
    payload = {**cd.abc.model_dump(), "coefficients": coefficients,
               "max_residual": max(r["residual"] for r in rows), "rows": rows}
    return CommandOutput(payload=payload, rows=rows, fieldnames=["u_re", "u_im", "residual"])

def _omega(service, cd) -> CommandOutput:
    derived = service.omega_constants(cd)
    printed = service.omega_constants_printed(cd)
    extracted = service.extract_omega_constants(cd)
    omega = service.verify_omega(cd)
    rows = [c.model_dump(mode="json") for c in (derived, printed, extracted)]
    payload = {**cd.abc.model_dump(), "omega_coefficients": omega, "constants": rows}
    return CommandOutput(payload=payload, rows=rows, fieldnames=["source", "ell0", "ell1", "C1", "C2"])

def run(args) -> CommandOutput:
    service = get_curve_service()
    cd = service.curve_from_abc(abc_from(args))
    emit = CurveEmit(args.emit)
    if emit == CurveEmit.BRANCH_POINTS:
        return _branch_points(service, cd)
    if emit == CurveEmit.MEASURES:
        return _measures(service, cd, args.points)
    if emit == CurveEmit.SEXTIC_RESIDUAL:
        return _sextic(service, cd)
    return _omega(service, cd)
