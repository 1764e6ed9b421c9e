"""Detector count series and power-law fit models."""

import enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .results import EXPONENT_ACCEPTANCE


class ChopperPhase(str, enum.Enum):
    """Chopper state during a count bin."""

    SIGNAL = "signal"
    BACKGROUND = "background"
    TRANSITION = "transition"
    UNKNOWN = "unknown"


class CountSeries(BaseModel):
    """Binned detector counts labelled by chopper phase."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    bin_edges: np.ndarray  # seconds, one more than counts
    counts: np.ndarray
    phases: Tuple[ChopperPhase, ...]
    power_uw: Optional[float] = None
    label: str = ""

    @field_validator("bin_edges", mode="before")
    @classmethod
    def _edges_array(cls, value: object) -> np.ndarray:
        array = np.array(value, dtype=float)
        array.setflags(write=False)
        return array

    @field_validator("counts", mode="before")
    @classmethod
    def _counts_array(cls, value: object) -> np.ndarray:
        raw = np.asarray(value)
        if raw.size and not np.all(np.equal(np.mod(raw, 1), 0)):
            raise ValueError("counts must be integers")
        array = raw.astype(np.int64)
        array.setflags(write=False)
        return array

    @field_validator("phases", mode="before")
    @classmethod
    def _phases_tuple(cls, value: object) -> Tuple[ChopperPhase, ...]:
        return tuple(ChopperPhase(v) for v in value)  # type: ignore[union-attr]

    @model_validator(mode="after")
    def _check_lengths(self) -> "CountSeries":
        if self.counts.ndim != 1:
            raise ValueError("counts must be 1-D")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")
        if len(self.phases) != self.counts.size:
            raise ValueError("every bin needs a phase label")
        if self.bin_edges.size != self.counts.size + 1:
            raise ValueError("bin_edges must have one more entry than counts")
        if np.any(np.diff(self.bin_edges) <= 0):
            raise ValueError("bin_edges must be strictly ascending")
        return self

    @property
    def bin_widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    @property
    def duration_s(self) -> float:
        return float(self.bin_edges[-1] - self.bin_edges[0])

    def mask(self, phase: ChopperPhase) -> np.ndarray:
        return np.array([p == phase for p in self.phases], dtype=bool)

    def with_phases(self, phases: Tuple[ChopperPhase, ...]) -> "CountSeries":
        return CountSeries(
            bin_edges=self.bin_edges,
            counts=self.counts,
            phases=phases,
            power_uw=self.power_uw,
            label=self.label,
        )


class RatePoint(BaseModel):
    """Background-subtracted rate at one excitation power."""

    model_config = ConfigDict(frozen=True)

    power_uw: float
    rate_cps: float
    sigma_cps: float = Field(..., ge=0)


class PowerLawFit(BaseModel):
    """Weighted fit of F = a W^b."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amplitude: float = Field(..., gt=0)
    exponent: float
    covariance: np.ndarray
    residuals: np.ndarray  # log-space, in units of their standard error
    n_points: int
    n_excluded: int = 0

    @model_validator(mode="after")
    def _check_covariance(self) -> "PowerLawFit":
        cov = self.covariance
        if cov.shape != (2, 2) or not np.allclose(cov, cov.T, rtol=1e-9, atol=0.0):
            raise ValueError("covariance must be a symmetric 2x2 matrix")
        if np.any(np.linalg.eigvalsh(cov) < -1e-12 * max(1.0, float(np.abs(cov).max()))):
            raise ValueError("covariance must be positive semidefinite")
        return self

    @property
    def amplitude_sigma(self) -> float:
        return float(np.sqrt(self.covariance[0, 0]))

    @property
    def exponent_sigma(self) -> float:
        return float(np.sqrt(self.covariance[1, 1]))

    @property
    def accepted(self) -> bool:
        low, high = EXPONENT_ACCEPTANCE
        return low <= self.exponent <= high
