"""Run configuration schema.

Keys carry their unit as a suffix (``_fs``, ``_um``, ``_umol_per_l`` ...).
Every section forbids unknown keys so that a typo never passes silently.
"""

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..utils.units import UMOL_TO_MOL, photon_energy, um2_to_cm2
from .apparatus import ApparatusSpec, BeamProfile, CollectionModel
from .plan import SimPlan
from .results import EntanglementParams
from .sample import SampleSpec
from .uncertainty import UncertaintyBudget


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def _split_list(value: object) -> object:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class RunSection(_Section):
    coverage_k: float = Field(2.0, ge=1)
    te_fs: float = Field(1620.0, gt=0)
    ae_um2: float = Field(2.1, gt=0)
    ae_min_um2: Optional[float] = Field(None, gt=0)
    ae_max_um2: Optional[float] = Field(None, gt=0)

    def entanglement(self) -> EntanglementParams:
        return EntanglementParams(
            te_fs=self.te_fs,
            ae_cm2=um2_to_cm2(self.ae_um2),
            ae_min_cm2=um2_to_cm2(self.ae_min_um2) if self.ae_min_um2 else None,
            ae_max_cm2=um2_to_cm2(self.ae_max_um2) if self.ae_max_um2 else None,
        )


class CollectionSection(_Section):
    kappa_max: float
    alpha_per_mm: float
    z0_mm: float

    def to_model(self) -> CollectionModel:
        return CollectionModel(**self.model_dump())


class ApparatusSection(_Section):
    rep_rate_hz: float
    pulse_fwhm_fs: float
    beam_fwhm_x0_um: float
    beam_fwhm_y0_um: float
    rayleigh_mm: float
    photon_energy_j: Optional[float] = None
    wavelength_nm: Optional[float] = None
    cuvette_length_cm: float
    path_transmittance: float
    photon_rate_per_s: Optional[float] = None
    f_lb_cps: float

    @model_validator(mode="after")
    def _energy_given(self) -> "ApparatusSection":
        if self.photon_energy_j is None and self.wavelength_nm is None:
            raise ValueError("one of photon_energy_j or wavelength_nm is required")
        return self

    @property
    def hnu(self) -> float:
        if self.photon_energy_j is not None:
            return self.photon_energy_j
        assert self.wavelength_nm is not None
        return photon_energy(self.wavelength_nm)

    def to_spec(self, collection: CollectionModel) -> ApparatusSpec:
        return ApparatusSpec(
            rep_rate_hz=self.rep_rate_hz,
            pulse_fwhm_fs=self.pulse_fwhm_fs,
            beam_fwhm_x0_um=self.beam_fwhm_x0_um,
            beam_fwhm_y0_um=self.beam_fwhm_y0_um,
            rayleigh_mm=self.rayleigh_mm,
            photon_energy_j=self.hnu,
            cuvette_length_cm=self.cuvette_length_cm,
            collection=collection,
            path_transmittance=self.path_transmittance,
            photon_rate=self.photon_rate_per_s,
            f_lb_cps=self.f_lb_cps,
        )


class LaserSection(_Section):
    fwhm_x0_um: float
    fwhm_y0_um: float
    rayleigh_mm: float
    pulse_fwhm_fs: float
    rep_rate_hz: float
    power_uw: float
    photon_energy_j: float

    def to_beam(self) -> BeamProfile:
        return BeamProfile(
            fwhm_x0_um=self.fwhm_x0_um,
            fwhm_y0_um=self.fwhm_y0_um,
            rayleigh_mm=self.rayleigh_mm,
            pulse_fwhm_fs=self.pulse_fwhm_fs,
            rep_rate_hz=self.rep_rate_hz,
            photon_energy_j=self.photon_energy_j,
            avg_power_w=self.power_uw * 1e-6,
        )


class UncertaintySection(_Section):
    concentration_rel: float = 0.03
    overlap_rel: float = 0.05
    collection_rel: float = 0.06
    transmittance_rel: float = 0.03
    photon_rate_rel: float = 0.08
    beam_width_rel: float = 0.05
    pulse_duration_rel: float = 0.05
    fit_slope_rel: float = 0.07

    def to_budget(self, coverage_k: float) -> UncertaintyBudget:
        values = {key[: -len("_rel")]: value for key, value in self.model_dump().items()}
        return UncertaintyBudget(**values, coverage_k=coverage_k)


class SampleSection(_Section):
    concentration_umol_per_l: float
    quantum_yield: float
    overlap_ratio: Optional[float] = None
    sigma_c_gm: Optional[float] = None
    sigma_c_u_gm: float = 0.0
    extinction_l_per_mol_cm: Optional[float] = None
    emission_csv: Optional[str] = None
    chain_csvs: List[str] = Field(default_factory=list)
    cuvette_csv: Optional[str] = None
    qe_csv: Optional[str] = None
    mirror_csv: Optional[str] = None

    @field_validator("chain_csvs", mode="before")
    @classmethod
    def _split(cls, value: object) -> object:
        return _split_list(value)

    @model_validator(mode="after")
    def _overlap_source(self) -> "SampleSection":
        spectra = (self.emission_csv, self.qe_csv, self.mirror_csv)
        if self.overlap_ratio is None and not all(spectra):
            raise ValueError(
                "give overlap_ratio, or emission_csv, qe_csv and mirror_csv to compute it"
            )
        return self

    def to_spec(self, name: str, overlap_ratio: Optional[float] = None) -> SampleSpec:
        ratio = overlap_ratio if overlap_ratio is not None else self.overlap_ratio
        return SampleSpec(
            name=name,
            concentration=self.concentration_umol_per_l * UMOL_TO_MOL,
            quantum_yield=self.quantum_yield,
            spectral_overlap_ratio=ratio,
            sigma_c_gm=self.sigma_c_gm,
            sigma_c_u_gm=self.sigma_c_u_gm,
            extinction=self.extinction_l_per_mol_cm,
        )


class SimSection(_Section):
    sample: str
    mode: Literal["c2pef", "e2pef"] = "c2pef"
    powers_uw: List[float] = Field(default_factory=list)
    integration_s: float
    chopper_hz: float = 10.0
    background_cps: float = 0.0
    rng_seed: int
    repeats: int = 1
    blocks: int = 1
    bins_per_period: int = 40
    transition_fraction: float = 0.05
    sigma_e_cm2: float = 0.0

    @field_validator("powers_uw", mode="before")
    @classmethod
    def _split(cls, value: object) -> object:
        return _split_list(value)

    def to_plan(self, sample: SampleSpec, apparatus: ApparatusSpec, beam: BeamProfile) -> SimPlan:
        return SimPlan(
            sample=sample,
            apparatus=apparatus,
            beam=beam,
            **self.model_dump(exclude={"sample", "mode", "sigma_e_cm2"}),
        )


class RunConfig(_Section):
    """A validated configuration file."""

    run: RunSection = Field(default_factory=RunSection)
    apparatus: ApparatusSection
    collection: CollectionSection
    laser: Optional[LaserSection] = None
    uncertainty: UncertaintySection = Field(default_factory=UncertaintySection)
    samples: Dict[str, SampleSection] = Field(default_factory=dict)
    sim: Optional[SimSection] = None

    def apparatus_spec(self) -> ApparatusSpec:
        return self.apparatus.to_spec(self.collection.to_model())

    def budget(self) -> UncertaintyBudget:
        return self.uncertainty.to_budget(self.run.coverage_k)
