"""Synthetic acquisition plan."""

from typing import List

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .apparatus import ApparatusSpec, BeamProfile
from .sample import SampleSpec


class SimPlan(BaseModel):
    """Everything needed to draw a reproducible synthetic measurement."""

    model_config = ConfigDict(frozen=True)

    sample: SampleSpec
    apparatus: ApparatusSpec
    beam: BeamProfile
    powers_uw: List[float] = Field(default_factory=list)
    integration_s: float = Field(..., gt=0, description="Per power point, or per E2PEF block")
    chopper_hz: float = Field(10.0, gt=0)
    background_cps: float = Field(0.0, ge=0)
    rng_seed: int = 0
    repeats: int = Field(1, ge=1)
    blocks: int = Field(1, ge=1)
    bins_per_period: int = Field(40, ge=4)
    transition_fraction: float = Field(0.05, ge=0, lt=0.5)

    @model_validator(mode="after")
    def _check_plan(self) -> "SimPlan":
        if any(p < 0 for p in self.powers_uw):
            raise ValueError("powers must be non-negative")
        if self.bins_per_period % 2:
            raise ValueError("bins_per_period must be even (two equal chopper phases)")
        if self.transition_bins_per_edge >= self.bins_per_period // 2:
            raise ValueError("transition_fraction leaves no open or closed bins")
        return self

    @property
    def transition_bins_per_edge(self) -> int:
        return int(round(self.transition_fraction * self.bins_per_period / 2))

    @property
    def bin_width_s(self) -> float:
        return 1.0 / (self.chopper_hz * self.bins_per_period)

    @property
    def periods(self) -> int:
        return max(1, int(round(self.integration_s * self.chopper_hz)))
