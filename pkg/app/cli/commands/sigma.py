"""
sigma
=====

The analytic branch σ(τ, t, H) and the region label of the point.
"""
from app.cli.commands import add_phase_arguments
from app.cli.output import CommandOutput
from app.dependencies import get_phase_service
from app.schemas.phase import PhasePoint

def register(subparsers) -> None:
    parser = subparsers.add_parser("sigma", help="solve the sigma-equation by continuation in t")
    add_phase_arguments(parser)
    parser.set_defaults(handler=run)

def run(args) -> CommandOutput:
    service = get_phase_service()
    pp = PhasePoint(tau=args.tau, t=args.t, h=args.h)
    classification = service.classify(pp)
    solution = service.solve_sigma(pp)
    return CommandOutput(payload={
        "tau": pp.tau,
        "t": pp.t,
        "H": pp.h,
        "region": classification.label.value,
        "t_critical": classification.t_critical,
        **solution.model_dump(),
    })
