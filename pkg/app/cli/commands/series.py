"""
series
======

Taylor coefficients of F in t by both series routes, with the closed-form
orders 1..3 for comparison.
"""
from fractions import Fraction

from app.cli.output import CommandOutput
from app.dependencies import get_free_energy_service
from app.exceptions import DomainError

FIELDNAMES = ["k", "coefficient", "log_route", "reference", "exact"]

def register(subparsers) -> None:
    parser = subparsers.add_parser("series", help="series of F in t at fixed (tau, H)")
    parser.add_argument("--tau", required=True, help="coupling; a fraction such as 1/2 with --exact")
    parser.add_argument("--H", dest="h", default="0", help="magnetic field")
    parser.add_argument("--q", default="1", help="q = e^H as a fraction, used with --exact")
    parser.add_argument("--order", type=int, default=6)
    parser.add_argument("--exact", action="store_true", help="rational arithmetic")
    parser.add_argument("--extended", action="store_true", help="mpmath arithmetic")
    parser.set_defaults(handler=run)

def _number(text: str, name: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"{name} must be a number or a fraction, got '{text}'")

def run(args) -> CommandOutput:
    tau = _number(args.tau, "--tau")
    if args.exact:
        h = _number(args.q, "--q")
    else:
        tau, h = float(tau), float(_number(args.h, "--H"))
    report = get_free_energy_service().series_report(tau, h, args.order, exact=args.exact, extended=args.extended)
    rows = []
    for k, value in enumerate(report.coefficients):
        rows.append({
            "k": k,
            "coefficient": value,
            "log_route": report.coefficients_log_route[k],
            "reference": report.reference[k - 1] if 1 <= k <= len(report.reference) else None,
            "exact": report.exact[k] if report.exact else None,
        })
    return CommandOutput(payload={"series": report}, rows=rows, fieldnames=FIELDNAMES)
