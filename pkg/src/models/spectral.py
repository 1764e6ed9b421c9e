"""Joint spectral and temporal intensity models.

Angular-frequency grids are in rad fs^-1 and time grids in fs, so that the
discrete Fourier pair needs no further scaling.
"""

import enum

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class GridUnit(str, enum.Enum):
    NANOMETER = "nm"
    RAD_PER_FS = "rad/fs"


def _frozen_array(value: object) -> np.ndarray:
    array = np.array(value, dtype=float)
    array.setflags(write=False)
    return array


class JointSpectrum(BaseModel):
    """JSI sampled on a (signal, idler) grid; rows follow grid_s."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid_s: np.ndarray
    grid_i: np.ndarray
    intensity: np.ndarray
    unit: GridUnit = GridUnit.RAD_PER_FS
    pump_center: float = 0.0  # omega_P/2 in rad fs^-1

    @field_validator("grid_s", "grid_i", "intensity", mode="before")
    @classmethod
    def _as_array(cls, value: object) -> np.ndarray:
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_shapes(self) -> "JointSpectrum":
        if self.intensity.shape != (self.grid_s.size, self.grid_i.size):
            raise ValueError(
                f"intensity shape {self.intensity.shape} does not match grids "
                f"({self.grid_s.size}, {self.grid_i.size})"
            )
        if np.any(~np.isfinite(self.intensity)) or np.any(self.intensity < 0):
            raise ValueError("JSI must be finite and non-negative")
        return self

    @property
    def mass(self) -> float:
        return float(self.intensity.sum())

    def marginal(self, axis: str) -> np.ndarray:
        """Projection onto the signal ('s') or idler ('i') axis."""
        return self.intensity.sum(axis=1 if axis == "s" else 0)


class JointTemporal(BaseModel):
    """JTI on a (t_s, t_i) grid in fs; rows follow grid_ts."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid_ts: np.ndarray
    grid_ti: np.ndarray
    intensity: np.ndarray

    @field_validator("grid_ts", "grid_ti", "intensity", mode="before")
    @classmethod
    def _as_array(cls, value: object) -> np.ndarray:
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_shapes(self) -> "JointTemporal":
        if self.intensity.shape != (self.grid_ts.size, self.grid_ti.size):
            raise ValueError("intensity shape does not match the time grids")
        if np.any(self.intensity < 0):
            raise ValueError("JTI must be non-negative")
        return self

    @property
    def mass(self) -> float:
        return float(self.intensity.sum())

    @property
    def dt_fs(self) -> float:
        return float(self.grid_ts[1] - self.grid_ts[0])


class DispersionSpec(BaseModel):
    """Quadratic spectral phase applied to each photon."""

    model_config = ConfigDict(frozen=True)

    gdd_fs2: float = 0.0

    @field_validator("gdd_fs2")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not np.isfinite(value):
            raise ValueError("gdd must be finite")
        return value

    @property
    def transform_limited(self) -> bool:
        return self.gdd_fs2 == 0.0
