"""Models package initialization."""

from .apparatus import ApparatusSpec, BeamProfile, CollectionModel, DetectorModel
from .config import RunConfig
from .photon import MuChainResult, PhotonNumberDist, SourceKind
from .plan import SimPlan
from .results import (
    C2PAResult,
    DiagonalPoint,
    E2PABound,
    EntanglementParams,
    LossScaledRate,
)
from .sample import SampleSpec, Spectrum, SpectrumKind
from .series import ChopperPhase, CountSeries, PowerLawFit, RatePoint
from .spectral import DispersionSpec, GridUnit, JointSpectrum, JointTemporal
from .uncertainty import UncertaintyBudget, UncertainValue

__all__ = [
    "ApparatusSpec",
    "BeamProfile",
    "CollectionModel",
    "DetectorModel",
    "RunConfig",
    "MuChainResult",
    "PhotonNumberDist",
    "SourceKind",
    "SimPlan",
    "C2PAResult",
    "DiagonalPoint",
    "E2PABound",
    "EntanglementParams",
    "LossScaledRate",
    "SampleSpec",
    "Spectrum",
    "SpectrumKind",
    "ChopperPhase",
    "CountSeries",
    "PowerLawFit",
    "RatePoint",
    "DispersionSpec",
    "GridUnit",
    "JointSpectrum",
    "JointTemporal",
    "UncertaintyBudget",
    "UncertainValue",
]
