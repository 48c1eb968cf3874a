"""
Application Dependency Providers
===============================

Cached service instances shared by the CLI commands:
- Phase space, series, free energy, spectral curve
- Enumeration, asymptotics, checks
- Thread pool factory capped by the run configuration

Services are stateless after construction and safe to share across threads.
"""

from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

from app.config import settings
from app.schemas.run_config import TUNABLE, RunConfig
from app.services.asymptotics import AsymptoticsService
from app.services.checks import ChecksService
from app.services.enumeration import EnumerationService
from app.services.free_energy import FreeEnergyService
from app.services.phase_space import PhaseSpaceService
from app.services.series import SeriesService
from app.services.spectral_curve import SpectralCurveService
from utils.logger import set_log_level

@lru_cache
def get_phase_service() -> PhaseSpaceService:
    return PhaseSpaceService()

@lru_cache
def get_series_service() -> SeriesService:
    return SeriesService()

@lru_cache
def get_free_energy_service() -> FreeEnergyService:
    return FreeEnergyService(get_phase_service(), get_series_service())

@lru_cache
def get_curve_service() -> SpectralCurveService:
    return SpectralCurveService(get_phase_service())

@lru_cache
def get_enumeration_service() -> EnumerationService:
    return EnumerationService()

@lru_cache
def get_asymptotics_service() -> AsymptoticsService:
    return AsymptoticsService(get_series_service(), get_phase_service())

@lru_cache
def get_checks_service() -> ChecksService:
    return ChecksService(
        get_phase_service(),
        get_curve_service(),
        get_free_energy_service(),
        get_enumeration_service(),
    )

PROVIDERS = (
    get_phase_service,
    get_series_service,
    get_free_energy_service,
    get_curve_service,
    get_enumeration_service,
    get_asymptotics_service,
    get_checks_service,
)

def apply_run_config(config: RunConfig) -> None:
    """
    Push the tunables of a run configuration into settings and drop the
    cached services so they are rebuilt with the new values.
    """
    for name, attr in TUNABLE.items():
        setattr(settings, attr, getattr(config, name))
    set_log_level(config.log_level)
    for provider in PROVIDERS:
        provider.cache_clear()

def get_thread_pool() -> ThreadPoolExecutor:
    """Worker pool capped by settings.THREADS (the run configuration's thread count)."""
    return ThreadPoolExecutor(max_workers=max(1, settings.THREADS))
