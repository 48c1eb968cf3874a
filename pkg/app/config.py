"""
Application Configuration
=========================

Handles environment variables with fallback defaults.

Every variable can be set with the ISING2MM_ prefix, e.g. ISING2MM_THREADS=8,
either in the environment or in a local .env file.
"""
import os
from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="ISING2MM_", env_file=".env", extra="ignore")

    # Output
    SCHEMA_VERSION: str = "ising2mm/1"
    LOG_LEVEL: str = os.getenv("ISING2MM_LOG_LEVEL", "WARNING")

    # Execution
    THREADS: int = 4
    SEED: int = 7

    # Domain handling
    STRICT_DOMAIN: bool = True
    CLASSIFY_TOL: float = 1e-9

    # sigma continuation
    NEWTON_TOL: float = 1e-13
    NEWTON_MAX_ITER: int = 50
    NEWTON_SLOW_ITER: int = 6
    INITIAL_STEP_DIVISOR: int = 32
    BRANCH_DETECT: float = 1e-7

    # Series / precision
    SERIES_ORDER: int = 24
    EXTENDED_DPS: int = 50

    # Free energy
    QUAD_TOL: float = 1e-11
    LAMBDA_STEPS: int = 64

    # Enumeration
    ENUM_CAP: int = 3
    ISING_MAX_VERTICES: int = 24

    # Asymptotics
    GUARD_BAND: float = 0.02
    AIRY_BAND: float = 0.05

settings = Settings()
