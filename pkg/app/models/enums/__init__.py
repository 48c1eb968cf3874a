from app.models.enums.phase import RegionLabel, Regime
from app.models.enums.methods import FreeEnergyMethod, MeasureKind, OutputFormat, CheckSuite, CurveEmit

__all__ = [
    "RegionLabel",
    "Regime",
    "FreeEnergyMethod",
    "MeasureKind",
    "OutputFormat",
    "CheckSuite",
    "CurveEmit",
]
