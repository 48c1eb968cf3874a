"""
sweep
=====

Region label, σ and F over a (τ, t) grid at fixed H. Cells outside the
genus-zero region keep σ and F blank. Rows are ordered τ-major.
"""
from app.cli.commands import parse_range
from app.cli.output import CommandOutput
from app.dependencies import get_free_energy_service, get_phase_service, get_thread_pool
from app.exceptions import Ising2mmError
from app.models.enums.methods import FreeEnergyMethod
from app.models.enums.phase import RegionLabel
from app.schemas.phase import PhasePoint
from utils.logger import init_logger

# Configure logger
logger = init_logger("SweepCommand")

FIELDNAMES = ["tau", "t", "H", "region", "sigma", "F"]

def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="phase data over a (tau, t) grid")
    parser.add_argument("--tau-range", required=True, help="start:stop:count")
    parser.add_argument("--t-range", required=True, help="start:stop:count")
    parser.add_argument("--H", dest="h", type=float, default=0.0)
    parser.add_argument("--method", choices=[m.value for m in FreeEnergyMethod], default=FreeEnergyMethod.U_INTEGRAL.value)
    parser.set_defaults(handler=run)

def sweep_cell(tau: float, t: float, h: float, method: FreeEnergyMethod) -> dict:
    row = {"tau": tau, "t": t, "H": h, "region": None, "sigma": None, "F": None}
    pp = PhasePoint(tau=tau, t=t, h=h)
    try:
        label = get_phase_service().classify(pp).label
        row["region"] = label.value
        if label == RegionLabel.GENUS_ZERO_INTERIOR or label.is_surface:
            result = get_free_energy_service().evaluate(pp, method)
            row["sigma"], row["F"] = result.sigma_used, result.value
    except Ising2mmError as e:
        logger.warning(f"sweep cell ({tau}, {t}, {h}) left blank: {e.detail}")
    return row

def run(args) -> CommandOutput:
    taus = parse_range(args.tau_range, "--tau-range")
    ts = parse_range(args.t_range, "--t-range")
    method = FreeEnergyMethod(args.method)
    cells = [(tau, t) for tau in taus for t in ts]
    with get_thread_pool() as pool:
        rows = list(pool.map(lambda cell: sweep_cell(cell[0], cell[1], args.h, method), cells))
    filled = sum(row["F"] is not None for row in rows)
    logger.info(f"sweep of {len(rows)} cells, {filled} inside the genus-zero region")
    return CommandOutput(payload={"shape": [len(taus), len(ts)], "rows": rows}, rows=rows, fieldnames=FIELDNAMES)
