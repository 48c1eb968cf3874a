"""
check
=====

Runs an invariant suite. The report goes to the output; a failed suite
also writes its witnesses to stderr and exits with code 1.
"""
from app.cli.output import CommandOutput
from app.config import settings
from app.dependencies import get_checks_service
from app.exceptions import CertificateFailure
from app.models.enums.methods import CheckSuite

FIELDNAMES = ["suite", "samples", "tolerance", "worst", "passed", "failures"]

def register(subparsers) -> None:
    parser = subparsers.add_parser("check", help="run an invariant suite")
    parser.add_argument("--suite", choices=[s.value for s in CheckSuite], default=CheckSuite.ALL.value)
    parser.add_argument("--samples", type=int, default=None, help="samples per sampled suite")
    parser.set_defaults(handler=run)

def run(args) -> CommandOutput:
    service = get_checks_service()
    report = service.run(CheckSuite(args.suite), args.samples, settings.SEED)
    rows = [
        {"suite": s.suite.value, "samples": s.samples, "tolerance": s.tolerance, "worst": s.worst,
         "passed": s.passed, "failures": len(s.failures)}
        for s in report.suites
    ]
    output = CommandOutput(payload={"passed": report.passed, "seed": report.seed, "suites": report.suites},
                           rows=rows, fieldnames=FIELDNAMES)
    try:
        service.require(report)
    except CertificateFailure as e:
        output.exit_code, output.error = e.exit_code, e.to_dict()
    return output
