"""
ising2mm Command Line
=====================

Builds the argument parser, assembles the run configuration and dispatches
to the subcommand handlers in app.cli.commands.

Exit codes:
    0: success
    1: failed certificate or numerical failure
    2: domain or usage error

Data goes to stdout (or --out); log records and error documents go to stderr.
"""

import argparse
import sys
from typing import List, Optional

from app.cli.commands import (
    check,
    curve,
    enumeration,
    free_energy,
    phase,
    series,
    sigma,
    sigma_coeffs,
    sweep,
)
from app.cli.output import emit, emit_error
from app.dependencies import apply_run_config, get_phase_service
from app.exceptions import Ising2mmError
from app.models.enums.methods import OutputFormat
from app.schemas.phase import PhasePoint
from app.schemas.run_config import RunConfig
from utils.logger import init_logger

# Configure logger
logger = init_logger("Ising2mm")

# Subcommand registration
# -----------------------
# Each module adds its parser and handler:
# - free-energy, sweep: F at a point and over a grid
# - sigma, phase: the σ branch, the parametrization and the critical surfaces
# - series, enumerate, sigma-coeffs: series in t and their cross-checks
# - curve: spectral curve data
# - check: invariant suites
COMMANDS = (free_energy, sweep, check, sigma, phase, series, curve, enumeration, sigma_coeffs)

GLOBAL_FLAGS = ("format", "out", "config_file", "threads", "seed")
LOCAL_KEYS = GLOBAL_FLAGS + ("verbose", "debug", "handler", "command")

def _add_global_options(parser: argparse.ArgumentParser, default) -> None:
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=default,
                        help="output format (default json)")
    parser.add_argument("--out", default=default, help="write output to PATH instead of stdout")
    parser.add_argument("--config", dest="config_file", default=default, help="key=value configuration file")
    parser.add_argument("--threads", type=int, default=default, help="worker threads (ISING2MM_THREADS)")
    parser.add_argument("--seed", type=int, default=default, help="seed of the sampling suites")
    parser.add_argument("--verbose", action="store_true", default=default, help="log at INFO")
    parser.add_argument("--debug", action="store_true", default=default, help="log at DEBUG")

def build_parser() -> argparse.ArgumentParser:
    """Global options are accepted before or after the subcommand name."""
    parser = argparse.ArgumentParser(
        prog="ising2mm",
        description="Ising model on random planar maps: phase space, free energy and spectral curve",
    )
    _add_global_options(parser, None)
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS:
        module.register(subparsers)
    for subparser in subparsers.choices.values():
        _add_global_options(subparser, argparse.SUPPRESS)
    return parser

def _region_hint(args) -> Optional[str]:
    """Region label of the phase point named by the arguments, if any."""
    tau, t = getattr(args, "tau", None), getattr(args, "t", None)
    if not isinstance(tau, float) or not isinstance(t, float):
        return None
    try:
        return get_phase_service().classify(PhasePoint(tau=tau, t=t, h=getattr(args, "h", 0.0) or 0.0)).label.value
    except Exception:
        return None

def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 after --help
        return int(e.code or 0)

    flags = {name: getattr(args, name, None) for name in GLOBAL_FLAGS}
    if getattr(args, "debug", None):
        flags["log_level"] = "DEBUG"
    elif getattr(args, "verbose", None):
        flags["log_level"] = "INFO"
    parameters = {k: v for k, v in vars(args).items() if k not in LOCAL_KEYS}

    try:
        config = RunConfig.assemble(args.command, flags, parameters)
        apply_run_config(config)
        output = args.handler(args)
        emit(output, config)
    except Ising2mmError as e:
        error = e.to_dict()
        if "region" not in error:
            region = _region_hint(args)
            if region is not None:
                error["region"] = region
        emit_error(error)
        return e.exit_code
    except Exception as e:
        logger.exception(f"{args.command} failed")
        emit_error({"error": type(e).__name__, "detail": str(e)})
        return 1

    if output.exit_code:
        emit_error(output.error or {})
        return output.exit_code
    return 0

def run() -> None:
    sys.exit(main())
