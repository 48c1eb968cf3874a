"""
sigma-coeffs
============

Exact coefficients σ_V = V! [t^V] σ(t) by two routes, and at H = 0 the
asymptotic estimate and the ratio estimate of the radius of convergence.
"""
from app.cli.output import CommandOutput
from app.dependencies import get_asymptotics_service

FIELDNAMES = ["V", "by_reversion", "by_lagrange"]

def register(subparsers) -> None:
    parser = subparsers.add_parser("sigma-coeffs", help="coefficients of sigma(t) and their asymptotics")
    parser.add_argument("--tau", type=float, required=True)
    parser.add_argument("--H", dest="h", type=float, default=0.0)
    parser.add_argument("--order", type=int, default=None, help="number of coefficients (default ISING2MM_SERIES_ORDER)")
    parser.add_argument("--asymptotic", type=int, default=None, metavar="V", help="compare order V with its estimate")
    parser.add_argument("--corrections", type=int, default=2, help="1/V correction terms of the saddle form")
    parser.add_argument("--ratio", type=int, default=None, metavar="V", help="ratio estimate of t_cr from order V")
    parser.set_defaults(handler=run)

def run(args) -> CommandOutput:
    service = get_asymptotics_service()
    coeffs = service.exact_sigma_coeffs(args.tau, args.h, args.order)
    rows = [
        {"V": k + 1, "by_reversion": x, "by_lagrange": y}
        for k, (x, y) in enumerate(zip(coeffs.by_reversion, coeffs.by_lagrange))
    ]
    payload = {"coefficients": coeffs}
    if args.asymptotic is not None:
        payload["estimate"] = service.estimate(args.tau, args.asymptotic, args.corrections)
    if args.ratio is not None:
        payload["ratio"] = service.ratio_estimate(args.tau, args.ratio, args.h)
    return CommandOutput(payload=payload, rows=rows, fieldnames=FIELDNAMES)
