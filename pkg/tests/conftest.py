"""Test fixtures and configuration."""
import math

import pytest

from dfock.config import Settings, get_settings
from dfock.schemas.fock import Truncation
from dfock.schemas.protocol import ChannelSpec, QubitSpec
from dfock.services import (
    DemodulationService,
    DisplacementService,
    FigureService,
    FockService,
    OpticsService,
    TeleportService,
)


@pytest.fixture
def settings() -> Settings:
    """Fresh settings, independent of any cached instance."""
    get_settings.cache_clear()
    return Settings()


@pytest.fixture
def fock_service(settings):
    """Fock service."""
    return FockService(settings)


@pytest.fixture
def displacement_service(settings):
    """Displacement service."""
    return DisplacementService(settings)


@pytest.fixture
def optics_service(settings):
    """Optics service."""
    return OpticsService(settings)


@pytest.fixture
def teleport_service(settings):
    """Teleport service."""
    return TeleportService(settings)


@pytest.fixture
def demodulation_service(settings):
    """Demodulation service."""
    return DemodulationService(settings)


@pytest.fixture
def figure_service(settings):
    """Figure service."""
    return FigureService(settings)


@pytest.fixture
def sample_truncation():
    """Small cutoff for hand-checkable states."""
    return Truncation(cutoff=6)


@pytest.fixture
def sample_qubit():
    """Balanced qubit in the (0,1) basis."""
    return QubitSpec(k=0, n=1, a0=1 / math.sqrt(2), a1=1 / math.sqrt(2))


@pytest.fixture
def sample_unbalanced_qubit():
    """Unbalanced qubit with a relative phase."""
    qubit, _ = QubitSpec.normalized(0, 1, 0.8, 0.6j)
    return qubit


@pytest.fixture
def sample_channel():
    """Channel with beta = 2 and the phase of the (0,1) basis."""
    return ChannelSpec(beta=2.0, phi=0.0)
