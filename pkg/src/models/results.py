"""Cross-section results and entanglement parameters."""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .uncertainty import UncertainValue

EXPONENT_ACCEPTANCE = (1.95, 2.05)


class C2PAResult(BaseModel):
    """Classical cross-section recovered from a quadratic power scan."""

    model_config = ConfigDict(frozen=True)

    sample_name: str
    sigma_c: UncertainValue  # GM
    fit_slope: UncertainValue  # counts s^-1 uW^-2
    fit_exponent: Optional[float] = None
    accepted: bool = True


class EntanglementParams(BaseModel):
    """Entanglement time and area, with an optional bracket on the area."""

    model_config = ConfigDict(frozen=True)

    te_fs: float = Field(..., gt=0)
    ae_cm2: float = Field(..., gt=0)
    ae_min_cm2: Optional[float] = Field(None, gt=0)
    ae_max_cm2: Optional[float] = Field(None, gt=0)

    @model_validator(mode="after")
    def _check_bracket(self) -> "EntanglementParams":
        if self.ae_min_cm2 is not None and self.ae_cm2 < self.ae_min_cm2:
            raise ValueError("entanglement area lies below its bracket")
        if self.ae_max_cm2 is not None and self.ae_cm2 > self.ae_max_cm2:
            raise ValueError("entanglement area lies above its bracket")
        return self


class E2PABound(BaseModel):
    """Per-sample entangled cross-section bound and quantum-advantage bound."""

    model_config = ConfigDict(frozen=True)

    sample_name: str
    sigma_e_ub: UncertainValue  # cm^2
    sigma_e_est: Optional[float] = None  # cm^2, at the nominal entanglement area
    sigma_e_est_bracket: Optional[Tuple[float, float]] = None  # at (ae_max, ae_min)
    qa_ub: Optional[UncertainValue] = None
    phi_min_classical: Optional[float] = None  # photons cm^-2 s^-1
    notes: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _positive(self) -> "E2PABound":
        if self.sigma_e_ub.value <= 0:
            raise ValueError("sigma_E upper bound must be positive")
        if self.qa_ub is not None and self.qa_ub.value <= 0:
            raise ValueError("QA upper bound must be positive")
        return self


class LossScaledRate(BaseModel):
    """E2PA excitation rate split into its linear and quadratic terms."""

    model_config = ConfigDict(frozen=True)

    transmittance: float
    phi_sample: float
    linear_term: float
    quadratic_term: float

    @property
    def total(self) -> float:
        return self.linear_term + self.quadratic_term


class DiagonalPoint(BaseModel):
    """One point of an expected-E2PEF line (count rate versus photons per pulse)."""

    model_config = ConfigDict(frozen=True)

    sigma_e_cm2: float
    mu: float
    peak_flux: float
    rate_cps: float
