"""Sample and spectrum models."""

import enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator
from scipy.integrate import trapezoid

from ..utils import units


class SpectrumKind(str, enum.Enum):
    """What a spectrum curve represents."""

    EMISSION = "emission"
    TRANSMITTANCE = "transmittance"
    REFLECTANCE = "reflectance"
    QUANTUM_EFFICIENCY = "quantum_efficiency"


class Spectrum(BaseModel):
    """A sampled spectral curve on an ascending wavelength grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    wavelength_nm: np.ndarray
    intensity: np.ndarray
    kind: SpectrumKind
    name: str = ""

    @field_validator("wavelength_nm", "intensity", mode="before")
    @classmethod
    def _as_array(cls, value: object) -> np.ndarray:
        array = np.array(value, dtype=float)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _check_grid(self) -> "Spectrum":
        if self.wavelength_nm.ndim != 1 or self.wavelength_nm.shape != self.intensity.shape:
            raise ValueError("wavelength and intensity must be 1-D arrays of equal length")
        if self.wavelength_nm.size < 2:
            raise ValueError("a spectrum needs at least two points")
        if np.any(np.diff(self.wavelength_nm) <= 0):
            raise ValueError("wavelength grid must be strictly ascending")
        if np.any(~np.isfinite(self.intensity)) or np.any(self.intensity < 0):
            raise ValueError("spectrum values must be finite and non-negative")
        if self.kind != SpectrumKind.EMISSION and np.any(self.intensity > 1.0):
            raise ValueError(f"{self.kind.value} values must lie in [0, 1]")
        return self

    @property
    def lower_nm(self) -> float:
        return float(self.wavelength_nm[0])

    @property
    def upper_nm(self) -> float:
        return float(self.wavelength_nm[-1])

    def integral(self) -> float:
        return float(trapezoid(self.intensity, self.wavelength_nm))

    def normalized_to(self, total: float) -> "Spectrum":
        """Return a copy scaled so its trapezoidal integral equals ``total``."""
        current = self.integral()
        if current <= 0:
            raise ValueError(f"spectrum {self.name!r} has zero integral and cannot be normalized")
        return self.model_copy(update={"intensity": self.intensity * (total / current)})


class SampleSpec(BaseModel):
    """A fluorophore solution as used in one measurement."""

    model_config = ConfigDict(frozen=True)

    name: str
    concentration: float = Field(..., gt=0, description="Molar concentration in mol L^-1")
    quantum_yield: float = Field(..., gt=0, le=1, description="Fluorescence quantum yield")
    spectral_overlap_ratio: float = Field(
        ..., gt=0, lt=1, description="Collected fraction of the emission, integral(gamma*Phi)/Phi"
    )
    sigma_c_gm: Optional[float] = Field(None, gt=0, description="Classical 2PA cross-section in GM")
    sigma_c_u_gm: float = Field(0.0, ge=0, description="Standard uncertainty of sigma_c_gm")
    extinction: Optional[float] = Field(
        None, ge=0, description="Molar extinction coefficient in L mol^-1 cm^-1"
    )

    @computed_field  # type: ignore[prop-decorator]
    @property
    def number_density(self) -> float:
        """Fluorophores per cm^3."""
        return units.number_density(self.concentration)

    @property
    def overlap_integral(self) -> float:
        """integral(gamma(lambda) Phi(lambda) dlambda)."""
        return self.spectral_overlap_ratio * self.quantum_yield
