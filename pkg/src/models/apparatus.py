"""Apparatus, beam, collection and detector models."""

import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator


class CollectionModel(BaseModel):
    """Parametric collection efficiency K(z) = kappa_max/2 * erfc(alpha (|z| - z0))."""

    model_config = ConfigDict(frozen=True)

    kappa_max: float = Field(..., gt=0, lt=1, description="Peak collection efficiency")
    alpha_per_mm: float = Field(..., gt=0, description="Edge steepness in mm^-1")
    z0_mm: float = Field(..., gt=0, description="Half-width of the collection plateau in mm")


class BeamProfile(BaseModel):
    """Pulsed Gaussian beam with independent x/y waists."""

    model_config = ConfigDict(frozen=True)

    fwhm_x0_um: float = Field(..., gt=0)
    fwhm_y0_um: float = Field(..., gt=0)
    rayleigh_mm: float = Field(..., gt=0)
    pulse_fwhm_fs: float = Field(..., gt=0)
    rep_rate_hz: float = Field(..., gt=0)
    photon_energy_j: float = Field(..., gt=0)
    avg_power_w: Optional[float] = Field(None, ge=0)
    photon_rate: Optional[float] = Field(None, ge=0, description="Photons per second")

    @model_validator(mode="after")
    def _check_power(self) -> "BeamProfile":
        if self.avg_power_w is None and self.photon_rate is None:
            raise ValueError("either avg_power_w or photon_rate is required")
        if self.avg_power_w is not None and self.photon_rate is not None:
            derived = self.avg_power_w / self.photon_energy_j
            if not math.isclose(derived, self.photon_rate, rel_tol=1e-6, abs_tol=0.0):
                raise ValueError(
                    f"photon_rate {self.photon_rate:.6g} disagrees with W/hnu = {derived:.6g}"
                )
        return self

    @property
    def photon_rate_q(self) -> float:
        """Photons per second, derived from the average power when needed."""
        if self.photon_rate is not None:
            return self.photon_rate
        assert self.avg_power_w is not None
        return self.avg_power_w / self.photon_energy_j

    def with_power_uw(self, power_uw: float) -> "BeamProfile":
        """Copy of the beam at a different average power."""
        return BeamProfile(
            **self.model_dump(exclude={"avg_power_w", "photon_rate"}),
            avg_power_w=power_uw * 1e-6,
        )

    def with_photon_rate(self, photon_rate: float) -> "BeamProfile":
        return BeamProfile(
            **self.model_dump(exclude={"avg_power_w", "photon_rate"}),
            photon_rate=photon_rate,
        )


class ApparatusSpec(BaseModel):
    """Entangled-source geometry plus the shared detection parameters."""

    model_config = ConfigDict(frozen=True)

    rep_rate_hz: float = Field(..., gt=0, description="Pulses per second")
    pulse_fwhm_fs: float = Field(..., gt=0)
    beam_fwhm_x0_um: float = Field(..., gt=0)
    beam_fwhm_y0_um: float = Field(..., gt=0)
    rayleigh_mm: float = Field(..., gt=0)
    photon_energy_j: float = Field(..., gt=0)
    cuvette_length_cm: float = Field(..., gt=0)
    collection: CollectionModel
    path_transmittance: float = Field(..., gt=0, le=1)
    photon_rate: Optional[float] = Field(None, gt=0, description="Entangled photons per second")
    f_lb_cps: float = Field(..., gt=0, description="Measurable fluorescence lower bound")

    def spdc_beam(self) -> BeamProfile:
        """The entangled-photon beam described by this apparatus."""
        if self.photon_rate is None:
            raise ValueError("apparatus has no photon_rate; the entangled beam is undefined")
        return BeamProfile(
            fwhm_x0_um=self.beam_fwhm_x0_um,
            fwhm_y0_um=self.beam_fwhm_y0_um,
            rayleigh_mm=self.rayleigh_mm,
            pulse_fwhm_fs=self.pulse_fwhm_fs,
            rep_rate_hz=self.rep_rate_hz,
            photon_energy_j=self.photon_energy_j,
            photon_rate=self.photon_rate,
        )


class DetectorModel(BaseModel):
    """Click detector with a non-paralyzing dead time."""

    model_config = ConfigDict(frozen=True)

    efficiency: float = Field(..., gt=0, le=1, description="System detection efficiency")
    dead_time_ns: float = Field(..., ge=0)
    rep_rate_hz: float = Field(..., gt=0)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def n_dead(self) -> int:
        """Pulses blanked after each click."""
        # guard against 4.0 landing at 3.9999...
        return int(math.floor(self.dead_time_ns * 1e-9 * self.rep_rate_hz + 1e-9))
