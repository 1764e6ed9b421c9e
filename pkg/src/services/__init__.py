"""Services package initialization."""

from .acquisition_service import AcquisitionService
from .beam_service import BeamService
from .bounds_service import BoundsService
from .entanglement_service import EntanglementService
from .photon_number_service import PhotonNumberService

__all__ = [
    "AcquisitionService",
    "BeamService",
    "BoundsService",
    "EntanglementService",
    "PhotonNumberService",
]
