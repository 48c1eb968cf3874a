"""
Run Configuration Schema
=========================

Effective configuration of one CLI invocation, assembled in three layers:
1. Defaults from app.config.settings (environment, .env)
2. An optional key=value config file
3. Command-line flags

Later layers win. The result is echoed in every JSON output.
"""
import os
from typing import Any, Dict, List, Optional
from dotenv import dotenv_values
from pydantic import BaseModel, Field, ValidationError
from app.config import settings
from app.exceptions import DomainError
from app.models.enums.methods import OutputFormat

# Fields a config file may set, mapped to their settings attribute
TUNABLE = {
    "threads": "THREADS",
    "seed": "SEED",
    "log_level": "LOG_LEVEL",
    "strict_domain": "STRICT_DOMAIN",
    "classify_tol": "CLASSIFY_TOL",
    "newton_tol": "NEWTON_TOL",
    "newton_max_iter": "NEWTON_MAX_ITER",
    "branch_detect": "BRANCH_DETECT",
    "series_order": "SERIES_ORDER",
    "extended_dps": "EXTENDED_DPS",
    "quad_tol": "QUAD_TOL",
    "lambda_steps": "LAMBDA_STEPS",
    "enum_cap": "ENUM_CAP",
    "guard_band": "GUARD_BAND",
    "airy_band": "AIRY_BAND",
}

class RunConfig(BaseModel):
    """
    Fields:
        command (str): subcommand name.
        format (OutputFormat): json, csv or table.
        out (Optional[str]): output path, stdout when None.
        config_file (Optional[str]): key=value file merged under the flags.
        parameters (Dict[str, Any]): the subcommand's own arguments.
        overrides (List[str]): tunables that differ from the settings defaults.
    """
    command: str
    format: OutputFormat = OutputFormat.JSON
    out: Optional[str] = None
    config_file: Optional[str] = None
    threads: int = settings.THREADS
    seed: int = settings.SEED
    log_level: str = settings.LOG_LEVEL
    strict_domain: bool = settings.STRICT_DOMAIN
    classify_tol: float = settings.CLASSIFY_TOL
    newton_tol: float = settings.NEWTON_TOL
    newton_max_iter: int = settings.NEWTON_MAX_ITER
    branch_detect: float = settings.BRANCH_DETECT
    series_order: int = settings.SERIES_ORDER
    extended_dps: int = settings.EXTENDED_DPS
    quad_tol: float = settings.QUAD_TOL
    lambda_steps: int = settings.LAMBDA_STEPS
    enum_cap: int = settings.ENUM_CAP
    guard_band: float = settings.GUARD_BAND
    airy_band: float = settings.AIRY_BAND
    parameters: Dict[str, Any] = Field(default_factory=dict)
    overrides: List[str] = Field(default_factory=list)

    @classmethod
    def assemble(cls, command: str, flags: Dict[str, Any], parameters: Dict[str, Any]) -> "RunConfig":
        """
        Merge settings, the config file named by flags["config_file"] and the flags.

        Flags whose value is None are treated as absent.

        Raises:
            DomainError: unknown key or unreadable config file
        """
        values: Dict[str, Any] = {name: getattr(settings, attr) for name, attr in TUNABLE.items()}
        path = flags.get("config_file")
        if path:
            values.update(read_config_file(path))
        values.update({k: v for k, v in flags.items() if v is not None})
        try:
            config = cls(command=command, parameters=parameters, **values)
        except ValidationError as e:
            raise DomainError(f"invalid configuration: {e.errors()[0]['msg']}", {"field": str(e.errors()[0]['loc'])})
        config.overrides = sorted(
            name for name, attr in TUNABLE.items() if getattr(config, name) != getattr(settings, attr)
        )
        return config

def read_config_file(path: str) -> Dict[str, Any]:
    """key=value lines, '#' comments; keys are RunConfig field names, case-insensitive."""
    if not os.path.isfile(path):
        raise DomainError(f"config file {path} not found", {"path": path})
    try:
        raw = dotenv_values(path)
    except OSError as e:
        raise DomainError(f"cannot read config file {path}: {e}")
    values = {}
    for key, value in raw.items():
        name = key.strip().lower()
        if name not in TUNABLE and name not in ("format", "out"):
            raise DomainError(f"unknown key '{key}' in config file {path}", {"key": key})
        values[name] = value
    return values
