"""
phase
=====

Moves between the parameter region R and the physical phase space:
- forward: (a, b, c) -> (τ, t, H) with the Jacobian
- inverse: (τ, t, H) -> (a, b, c)
- critical surfaces: r_low(b, c), r_high(b, c) and γ_b(c), with the discriminant
"""
from app.cli.commands import abc_from, add_abc_arguments
from app.cli.output import CommandOutput
from app.dependencies import get_phase_service
from app.exceptions import DomainError
from app.schemas.phase import PhasePoint

SURFACES = ("low", "high", "gamma-b")

def register(subparsers) -> None:
    parser = subparsers.add_parser("phase", help="map between (a, b, c) and (tau, t, H)")
    add_abc_arguments(parser, required=False)
    parser.add_argument("--tau", type=float, default=None, help="invert this phase point")
    parser.add_argument("--t", type=float, default=None)
    parser.add_argument("--H", dest="h", type=float, default=0.0)
    parser.add_argument("--surface", choices=SURFACES, default=None,
                        help="critical surface point from --b --c (gamma-b uses --c only)")
    parser.set_defaults(handler=run)

def _describe(pp: PhasePoint) -> dict:
    service = get_phase_service()
    classification = service.classify(pp)
    return {
        "tau": pp.tau,
        "t": pp.t,
        "H": pp.h,
        "region": classification.label.value,
        "t_critical": classification.t_critical,
    }

def run(args) -> CommandOutput:
    service = get_phase_service()
    if args.surface is not None:
        if args.c is None or (args.surface != "gamma-b" and args.b is None):
            raise DomainError("--surface needs --b and --c (gamma-b: --c)")
        if args.surface == "low":
            pp = service.critical_surface_low(args.b, args.c)
        elif args.surface == "high":
            pp = service.critical_surface_high(args.b, args.c)
        else:
            pp = service.critical_curve_b(args.c)
        payload = {"surface": args.surface, **_describe(pp),
                   "discriminant_scaled": service.discriminant_scaled(pp.tau, pp.t, pp.cosh_h)}
        return CommandOutput(payload=payload)
    if args.a is not None and args.b is not None and args.c is not None:
        p = abc_from(args)
        pp = service.map_abc(p)
        payload = {"a": p.a, "b": p.b, "c": p.c, **_describe(pp), "sigma": p.sigma,
                   "jacobian": service.jacobian_abc(p),
                   "jacobian_finite_difference": service.jacobian_finite_difference(p)}
        return CommandOutput(payload=payload)
    if args.tau is not None and args.t is not None:
        pp = PhasePoint(tau=args.tau, t=args.t, h=args.h)
        p = service.invert_phase_point(pp)
        return CommandOutput(payload={**_describe(pp), "a": p.a, "b": p.b, "c": p.c, "sigma": p.sigma})
    raise DomainError("phase needs --a --b --c, --tau --t [--H], or --surface")
