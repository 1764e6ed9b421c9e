"""Photon-number statistics models."""

import enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SourceKind(str, enum.Enum):
    """Light sources with known second-order coherence."""

    COHERENT = "coherent"
    THERMAL = "thermal"
    SMSV = "smsv"


class PhotonNumberDist(BaseModel):
    """Truncated photon-number distribution P(n), n = 0..n_max."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    probs: np.ndarray
    mu: float = Field(..., gt=0, description="Mean photons per pulse")
    mode_count: int = Field(1, ge=1)

    @field_validator("probs", mode="before")
    @classmethod
    def _as_array(cls, value: object) -> np.ndarray:
        array = np.array(value, dtype=float)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _check_probs(self) -> "PhotonNumberDist":
        if self.probs.ndim != 1 or self.probs.size == 0:
            raise ValueError("probs must be a non-empty 1-D array")
        if np.any(self.probs < 0):
            raise ValueError("probabilities must be non-negative")
        return self

    @property
    def n_max(self) -> int:
        return int(self.probs.size - 1)

    @property
    def tail_mass(self) -> float:
        return float(max(0.0, 1.0 - self.probs.sum()))

    def mean(self) -> float:
        return float(np.dot(np.arange(self.probs.size), self.probs))


class MuChainResult(BaseModel):
    """Every intermediate of the count-rate to mean-photon-number chain."""

    model_config = ConfigDict(frozen=True)

    count_rate: float
    rep_rate_hz: float
    efficiency: float
    dead_time_ns: float
    n_dead: int
    mode_count: int
    p_meas: float
    p_corr: float
    mu: float
