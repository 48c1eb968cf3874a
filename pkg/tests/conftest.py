import numpy as np
import pytest

from app.config import settings
from app.dependencies import PROVIDERS
from app.schemas.run_config import TUNABLE
from app.services.asymptotics import AsymptoticsService
from app.services.checks import ChecksService
from app.services.enumeration import EnumerationService
from app.services.free_energy import FreeEnergyService
from app.services.phase_space import PhaseSpaceService
from app.services.series import SeriesService
from app.services.spectral_curve import SpectralCurveService

@pytest.fixture(autouse=True)
def restore_settings():
    """The CLI pushes its run configuration into settings; undo it after each test."""
    saved = {attr: getattr(settings, attr) for attr in TUNABLE.values()}
    yield
    for attr, value in saved.items():
        setattr(settings, attr, value)
    for provider in PROVIDERS:
        provider.cache_clear()

@pytest.fixture
def rng():
    return np.random.default_rng(12345)

@pytest.fixture
def phase():
    return PhaseSpaceService()

@pytest.fixture
def series():
    return SeriesService()

@pytest.fixture
def free_energy(phase, series):
    return FreeEnergyService(phase, series)

@pytest.fixture
def curve(phase):
    return SpectralCurveService(phase)

@pytest.fixture
def enumeration():
    return EnumerationService(threads=2)

@pytest.fixture
def asymptotics(series, phase):
    return AsymptoticsService(series, phase)

@pytest.fixture
def checks(phase, curve, free_energy, enumeration):
    return ChecksService(phase, curve, free_energy, enumeration, threads=2)
