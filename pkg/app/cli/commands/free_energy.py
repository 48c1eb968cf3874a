"""
free-energy
===========

F(τ, t, H) at one point of the genus-zero region.
"""
from app.cli.commands import add_phase_arguments, require_genus_zero
from app.cli.output import CommandOutput
from app.dependencies import get_free_energy_service
from app.models.enums.methods import FreeEnergyMethod
from app.schemas.phase import PhasePoint

def register(subparsers) -> None:
    parser = subparsers.add_parser("free-energy", help="evaluate F(tau, t, H)")
    add_phase_arguments(parser)
    parser.add_argument("--method", choices=[m.value for m in FreeEnergyMethod], default=FreeEnergyMethod.U_INTEGRAL.value,
                        help="uv: integral over u in [0, sigma]; lambda: integral of the planar f(lambda)")
    parser.add_argument("--tol", type=float, default=None, help="absolute quadrature tolerance")
    parser.set_defaults(handler=run)

def run(args) -> CommandOutput:
    pp = PhasePoint(tau=args.tau, t=args.t, h=args.h)
    require_genus_zero(pp)
    result = get_free_energy_service().evaluate(pp, FreeEnergyMethod(args.method), args.tol)
    return CommandOutput(payload={
        "tau": pp.tau,
        "t": pp.t,
        "H": pp.h,
        "sigma": result.sigma_used,
        "F": result.value,
        "method": result.method.value,
        "quad_err": result.quad_error_estimate,
    })
