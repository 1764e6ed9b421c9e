"""Uncertain values and the default input uncertainty budget."""

from pydantic import BaseModel, ConfigDict, Field


class UncertainValue(BaseModel):
    """A value with its standard uncertainty and coverage factor."""

    model_config = ConfigDict(frozen=True)

    value: float
    std_uncertainty: float = Field(0.0, ge=0)
    coverage_k: float = Field(2.0, ge=1)

    @property
    def expanded(self) -> float:
        return self.coverage_k * self.std_uncertainty

    @property
    def relative(self) -> float:
        """Relative standard uncertainty; NaN when the value is zero."""
        if self.value == 0:
            return float("nan")
        return self.std_uncertainty / abs(self.value)

    @property
    def relative_defined(self) -> bool:
        return self.value != 0

    @classmethod
    def from_relative(cls, value: float, rel_u: float, coverage_k: float = 2.0) -> "UncertainValue":
        return cls(value=value, std_uncertainty=abs(value) * rel_u, coverage_k=coverage_k)

    def __str__(self) -> str:
        return f"{self.value:.4g} +/- {self.expanded:.2g} (k={self.coverage_k:g})"


class UncertaintyBudget(BaseModel):
    """Relative standard uncertainties of the model inputs."""

    model_config = ConfigDict(frozen=True)

    concentration: float = Field(0.03, ge=0)
    overlap: float = Field(0.05, ge=0)
    collection: float = Field(0.06, ge=0)
    transmittance: float = Field(0.03, ge=0)
    photon_rate: float = Field(0.08, ge=0)
    beam_width: float = Field(0.05, ge=0)
    pulse_duration: float = Field(0.05, ge=0)
    fit_slope: float = Field(0.07, ge=0, description="Used when a slope has no fit uncertainty")
    coverage_k: float = Field(2.0, ge=1)
