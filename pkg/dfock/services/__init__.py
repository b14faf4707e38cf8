"""Service layer for the simulator."""
from dfock.services.fock_service import FockService
from dfock.services.displacement_service import DisplacementService
from dfock.services.optics_service import OpticsService
from dfock.services.teleport_service import TeleportService
from dfock.services.demodulation_service import DemodulationService
from dfock.services.figure_service import FigureService

__all__ = [
    "FockService",
    "DisplacementService",
    "OpticsService",
    "TeleportService",
    "DemodulationService",
    "FigureService",
]
