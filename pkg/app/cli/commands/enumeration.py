"""
enumerate
=========

Genus-zero coefficients of the Wick-enumerated free energy, with the
n-grading present at each order.
"""
from fractions import Fraction

from app.cli.output import CommandOutput
from app.dependencies import get_enumeration_service
from app.exceptions import DomainError

FIELDNAMES = ["k", "genus_zero", "exact", "n_support"]

def register(subparsers) -> None:
    parser = subparsers.add_parser("enumerate", help="Wick enumeration of quartic ribbon diagrams")
    parser.add_argument("--vmax", type=int, default=3, help="highest vertex count")
    parser.add_argument("--tau", default="1/2")
    parser.add_argument("--H", dest="h", type=float, default=0.0)
    parser.add_argument("--q", default="1", help="q = e^H as a fraction, used with --exact")
    parser.add_argument("--exact", action="store_true", help="rational arithmetic")
    parser.add_argument("--allow-large", action="store_true", help="lift the configured cap to the hard cap")
    parser.add_argument("--graphs", action="store_true", help="add the small-graph Ising sums of orders 1 and 2")
    parser.set_defaults(handler=run)

def run(args) -> CommandOutput:
    service = get_enumeration_service()
    try:
        tau = Fraction(args.tau)
        q = Fraction(args.q)
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"--tau and --q must be numbers or fractions, got '{args.tau}', '{args.q}'")
    if args.exact:
        report = service.wick_report(tau, q, args.vmax, exact=True, allow_large=args.allow_large)
    else:
        report = service.wick_report(float(tau), args.h, args.vmax, allow_large=args.allow_large)
    rows = [
        {"k": k, "genus_zero": value, "exact": report.exact[k] if report.exact else None,
         "n_support": " ".join(str(e) for e in report.n_support[k])}
        for k, value in enumerate(report.genus_zero)
    ]
    payload = {"enumeration": report}
    if args.graphs:
        first, second = service.ising_graph_aggregate(float(tau), report.h)
        payload["graph_sums"] = {"order1": first, "order2": second}
    return CommandOutput(payload=payload, rows=rows, fieldnames=FIELDNAMES)
