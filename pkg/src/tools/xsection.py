"""
Cross-Section Tools
Forward fluorescence models for classical (C2PEF) and entangled (E2PEF)
excitation, sigma_C extraction, sigma_E upper bounds and estimates, the
quantum-advantage bound and loss scaling.

Cross-sections: sigma_C in GM, sigma_E in cm^2. Fluxes in photons cm^-2 s^-1.
"""

import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from ..models.apparatus import ApparatusSpec, BeamProfile
from ..models.results import (
    EXPONENT_ACCEPTANCE,
    C2PAResult,
    DiagonalPoint,
    E2PABound,
    EntanglementParams,
    LossScaledRate,
)
from ..models.sample import SampleSpec
from ..models.uncertainty import UncertaintyBudget, UncertainValue
from ..utils.exceptions import DomainError, SingularityError
from ..utils.units import CM2_TO_UM2, FS_TO_S, GM_TO_CM4_S, UW_TO_W
from .optics import (
    collection_integral,
    geometric_overlap_integral,
    mean_photons_per_pulse,
    peak_flux,
    peak_flux_from_mu,
)
from .stats import propagate

logger = structlog.get_logger("xsection")

# sqrt(2) (ln2/pi)^(3/2): spatio-temporal overlap of a Gaussian pulse with itself
C2PEF_GEOMETRY = math.sqrt(2.0) * (math.log(2.0) / math.pi) ** 1.5
DEFAULT_DIAGONAL_MU = tuple(float(m) for m in np.logspace(-3, 3, 13))


def e2pa_rate(sigma_e_cm2: float, sigma_c_gm: float, phi: float) -> float:
    """Excitations per second per fluorophore: (sigma_E phi + 3 sigma_C phi^2) / 2."""
    if sigma_e_cm2 < 0 or sigma_c_gm < 0 or phi < 0:
        raise DomainError("cross-sections and flux must be non-negative")
    return 0.5 * (sigma_e_cm2 * phi + 3.0 * sigma_c_gm * GM_TO_CM4_S * phi**2)


def crossover_flux(sigma_e_cm2: float, sigma_c_gm: float) -> float:
    """Flux at which the entangled and classical terms are equal."""
    if not sigma_c_gm > 0:
        raise SingularityError("sigma_C must be positive", factor="sigma_C")
    return sigma_e_cm2 / (3.0 * sigma_c_gm * GM_TO_CM4_S)


def _require_sigma_c(sample: SampleSpec) -> float:
    if sample.sigma_c_gm is None:
        raise DomainError(f"sample {sample.name!r} has no classical cross-section")
    return sample.sigma_c_gm


def _cuvette_half_mm(app: ApparatusSpec) -> float:
    return app.cuvette_length_cm * 10.0 / 2.0


def c2pef_slope_per_gm(sample: SampleSpec, app: ApparatusSpec, beam: BeamProfile) -> float:
    """
    C2PEF count rate per uW^2 for a cross-section of 1 GM.

    Raises:
        SingularityError: If the z-integral or the overlap vanishes
    """
    geometric = geometric_overlap_integral(app.collection, beam, _cuvette_half_mm(app))
    if geometric <= 0:
        raise SingularityError("collection z-integral is zero", factor="z-integral")
    if sample.overlap_integral <= 0:
        raise SingularityError("spectral overlap is zero", factor="overlap")
    tau_s = beam.pulse_fwhm_fs * FS_TO_S
    return (
        C2PEF_GEOMETRY
        * GM_TO_CM4_S
        * sample.number_density
        * UW_TO_W**2
        / (tau_s * beam.rep_rate_hz * beam.photon_energy_j**2)
        * geometric
        * sample.overlap_integral
    )


def c2pef_forward(
    sample: SampleSpec, app: ApparatusSpec, beam: BeamProfile, power_uw: float
) -> float:
    """
    Classical two-photon excited fluorescence rate.

    Args:
        sample: Sample with sigma_c_gm set
        app: Apparatus providing the cuvette length and collection model
        beam: Laser beam (widths, pulse duration, rep rate, photon energy)
        power_uw: Average laser power in uW

    Returns:
        Detected counts per second

    Raises:
        DomainError: If sigma_C is missing or the power is negative
    """
    sigma_c = _require_sigma_c(sample)
    if power_uw < 0:
        raise DomainError("power must be non-negative")
    return sigma_c * c2pef_slope_per_gm(sample, app, beam) * power_uw**2


def extract_sigma_c(
    fit_slope: Union[float, UncertainValue],
    sample: SampleSpec,
    app: ApparatusSpec,
    beam: BeamProfile,
    budget: Optional[UncertaintyBudget] = None,
    fit_exponent: Optional[float] = None,
) -> C2PAResult:
    """
    Classical cross-section from the quadratic slope F_C / W^2.

    The slope's own uncertainty is used when present, otherwise the budget's
    fit_slope entry; concentration, overlap, collection, beam widths and pulse
    duration are propagated alongside it.
    """
    budget = budget or UncertaintyBudget()
    slope = fit_slope if isinstance(fit_slope, UncertainValue) else UncertainValue(value=fit_slope)
    if not slope.value > 0:
        raise DomainError(f"fit slope must be positive, got {slope.value}")

    per_gm = c2pef_slope_per_gm(sample, app, beam)
    sigma_c = slope.value / per_gm
    slope_rel = slope.relative if slope.std_uncertainty > 0 else budget.fit_slope
    uncertainty = propagate(
        [
            (UncertainValue(value=1.0, std_uncertainty=slope_rel), 1.0),
            (UncertainValue(value=1.0, std_uncertainty=budget.concentration), -1.0),
            (UncertainValue(value=1.0, std_uncertainty=budget.overlap), -1.0),
            (UncertainValue(value=1.0, std_uncertainty=budget.collection), -1.0),
            (UncertainValue(value=1.0, std_uncertainty=budget.beam_width), 1.0),
            (UncertainValue(value=1.0, std_uncertainty=budget.beam_width), 1.0),
            (UncertainValue(value=1.0, std_uncertainty=budget.pulse_duration), 1.0),
        ],
        coverage_k=budget.coverage_k,
    )
    accepted = True
    if fit_exponent is not None:
        low, high = EXPONENT_ACCEPTANCE
        accepted = low <= fit_exponent <= high

    logger.info(
        "xsection.extract_sigma_c.computed",
        sample=sample.name,
        slope=slope.value,
        sigma_c_gm=sigma_c,
        rel_u=uncertainty.std_uncertainty,
    )
    return C2PAResult(
        sample_name=sample.name,
        sigma_c=UncertainValue.from_relative(
            sigma_c, uncertainty.std_uncertainty, budget.coverage_k
        ),
        fit_slope=UncertainValue(
            value=slope.value,
            std_uncertainty=slope.value * slope_rel,
            coverage_k=budget.coverage_k,
        ),
        fit_exponent=fit_exponent,
        accepted=accepted,
    )


def _e2pef_denominator(sample: SampleSpec, app: ApparatusSpec) -> float:
    """T Q n integral(K dz over +/- zR) overlap, with every factor checked."""
    if app.photon_rate is None:
        raise SingularityError("entangled photon rate Q is not set", factor="Q")
    k_integral = collection_integral(app.collection, app.rayleigh_mm)
    factors = (
        ("transmittance", app.path_transmittance),
        ("Q", app.photon_rate),
        ("n", sample.number_density),
        ("K integral", k_integral),
        ("overlap", sample.overlap_integral),
    )
    for name, value in factors:
        if not value > 0:
            raise SingularityError(f"{name} is zero", factor=name)
    return float(np.prod([value for _, value in factors]))


def sigma_e_upper_bound(sample: SampleSpec, app: ApparatusSpec) -> float:
    """
    Largest sigma_E consistent with no E2PEF above F_LB.

    Returns:
        2 F_LB / (T Q n integral(K) overlap) in cm^2

    Raises:
        SingularityError: If any denominator factor is zero; the error names it
    """
    bound = 2.0 * app.f_lb_cps / _e2pef_denominator(sample, app)
    logger.info("xsection.sigma_e_upper_bound.computed", sample=sample.name, sigma_e_ub=bound)
    return bound


def expected_e2pef(sigma_e_cm2: float, sample: SampleSpec, app: ApparatusSpec) -> float:
    """Expected E2PEF count rate for a given sigma_E at the apparatus photon rate."""
    if sigma_e_cm2 < 0:
        raise DomainError("sigma_E must be non-negative")
    return 0.5 * sigma_e_cm2 * _e2pef_denominator(sample, app)


def sigma_e_estimate(sigma_c_gm: float, te_fs: float, ae_cm2: float) -> float:
    """sigma_C / (T_e A_e) in cm^2."""
    if te_fs == 0 or ae_cm2 == 0:
        raise SingularityError("entanglement time and area must be nonzero", factor="Te*Ae")
    if sigma_c_gm < 0 or te_fs < 0 or ae_cm2 < 0:
        raise DomainError("sigma_C, T_e and A_e must be positive")
    return sigma_c_gm * GM_TO_CM4_S / (te_fs * FS_TO_S * ae_cm2)


def required_entanglement_area(sigma_c_gm: float, sigma_e_cm2: float, te_fs: float) -> float:
    """Entanglement area in um^2 that reconciles a reported sigma_E with sigma_C."""
    if not (sigma_c_gm > 0 and sigma_e_cm2 > 0 and te_fs > 0):
        raise DomainError("sigma_C, sigma_E and T_e must be positive")
    return sigma_c_gm * GM_TO_CM4_S / (sigma_e_cm2 * te_fs * FS_TO_S) * CM2_TO_UM2


def minimum_classical_flux(
    sample: SampleSpec, app: ApparatusSpec, beam_laser: BeamProfile
) -> float:
    """Peak laser flux at the power where C2PEF reaches F_LB (pure quadratic law)."""
    slope = _require_sigma_c(sample) * c2pef_slope_per_gm(sample, app, beam_laser)
    power_uw = math.sqrt(app.f_lb_cps / slope)
    return peak_flux(beam_laser.with_power_uw(power_uw))


def quantum_advantage_ub(
    sample: SampleSpec, app: ApparatusSpec, beam_laser: BeamProfile, phi_spdc_max: float
) -> float:
    """Minimum classical peak flux over the largest entangled peak flux used."""
    if not phi_spdc_max > 0:
        raise DomainError("entangled peak flux must be positive")
    return minimum_classical_flux(sample, app, beam_laser) / phi_spdc_max


def e2pef_diagonals(
    sample: SampleSpec,
    app: ApparatusSpec,
    sigma_e_values: Optional[Sequence[float]] = None,
    mu_values: Optional[Sequence[float]] = None,
) -> List[DiagonalPoint]:
    """
    Expected E2PEF lines, count rate versus photons per pulse.

    Each line is linear in mu, scaled from the rate at mu_Q = Q/g. Without
    explicit values, sigma_E runs in decades from 10^-2 to 10^2 times the bound.
    """
    beam = app.spdc_beam()
    mu_q = mean_photons_per_pulse(beam)
    if sigma_e_values is None:
        exponent = math.floor(math.log10(sigma_e_upper_bound(sample, app)))
        sigma_e_values = [10.0 ** (exponent + step) for step in range(-2, 3)]
    mu_values = DEFAULT_DIAGONAL_MU if mu_values is None else mu_values

    points: List[DiagonalPoint] = []
    for sigma_e in sigma_e_values:
        rate_at_q = expected_e2pef(sigma_e, sample, app)
        for mu in mu_values:
            points.append(
                DiagonalPoint(
                    sigma_e_cm2=sigma_e,
                    mu=mu,
                    peak_flux=peak_flux_from_mu(beam, mu),
                    rate_cps=rate_at_q * mu / mu_q,
                )
            )
    return points


def loss_scaled_rate(
    sigma_e_cm2: float, sigma_c_gm: float, transmittance: float, phi_sample: float
) -> LossScaledRate:
    """Split (sigma_E T phi + 3 sigma_C phi^2) / 2 into its two terms."""
    if not 0 < transmittance <= 1:
        raise DomainError(f"transmittance must lie in (0, 1], got {transmittance}")
    if sigma_e_cm2 < 0 or sigma_c_gm < 0 or phi_sample < 0:
        raise DomainError("cross-sections and flux must be non-negative")
    return LossScaledRate(
        transmittance=transmittance,
        phi_sample=phi_sample,
        linear_term=0.5 * sigma_e_cm2 * transmittance * phi_sample,
        quadratic_term=1.5 * sigma_c_gm * GM_TO_CM4_S * phi_sample**2,
    )


def attenuation_scan(
    sigma_e_cm2: float,
    sigma_c_gm: float,
    phi_xtal: float,
    factors: Sequence[float],
    mode: str = "downconversion",
    path_transmittance: float = 1.0,
) -> List[LossScaledRate]:
    """
    Loss-scaled rates for a series of attenuation factors.

    ``downconversion`` attenuates the pair beam, so the transmittance and the
    delivered flux both scale with the factor. ``pump`` attenuates the pump,
    which scales the delivered flux at fixed transmittance.
    """
    if mode not in ("downconversion", "pump"):
        raise DomainError(f"mode must be 'downconversion' or 'pump', got {mode!r}")
    rates = []
    for factor in factors:
        if mode == "downconversion":
            t = path_transmittance * factor
            rates.append(loss_scaled_rate(sigma_e_cm2, sigma_c_gm, t, t * phi_xtal))
        else:
            phi = path_transmittance * factor * phi_xtal
            rates.append(loss_scaled_rate(sigma_e_cm2, sigma_c_gm, path_transmittance, phi))
    return rates


def _relative(rel_terms: Sequence[Tuple[float, float]], coverage_k: float) -> float:
    combined = propagate(
        [(UncertainValue(value=1.0, std_uncertainty=rel), power) for rel, power in rel_terms],
        coverage_k=coverage_k,
    )
    return combined.std_uncertainty


def bound_sample(
    sample: SampleSpec,
    app: ApparatusSpec,
    beam_laser: Optional[BeamProfile],
    phi_spdc_max: float,
    entanglement: Optional[EntanglementParams] = None,
    budget: Optional[UncertaintyBudget] = None,
) -> E2PABound:
    """
    Upper bound, estimate and quantum-advantage bound for one sample.

    Args:
        sample: Sample under test
        app: Entangled-source apparatus
        beam_laser: Laser beam used for the classical measurement; QA^UB is
            skipped without it
        phi_spdc_max: Largest entangled peak flux delivered
        entanglement: T_e and A_e for the sigma_E estimate
        budget: Relative input uncertainties

    Returns:
        E2PABound with expanded uncertainties; skipped quantities are noted
    """
    if not phi_spdc_max > 0:
        raise DomainError("entangled peak flux must be positive")
    budget = budget or UncertaintyBudget()
    k = budget.coverage_k
    notes: List[str] = []

    ub = sigma_e_upper_bound(sample, app)
    ub_rel = _relative(
        [
            (budget.concentration, -1.0),
            (budget.overlap, -1.0),
            (budget.collection, -1.0),
            (budget.transmittance, -1.0),
            (budget.photon_rate, -1.0),
        ],
        k,
    )

    sigma_e_est = None
    bracket = None
    qa = None
    phi_min = None
    if sample.sigma_c_gm is None:
        notes.append("sigma_C absent: QA^UB and sigma_E estimate skipped")
    else:
        if entanglement is not None:
            te = entanglement.te_fs
            sigma_e_est = sigma_e_estimate(sample.sigma_c_gm, te, entanglement.ae_cm2)
            if entanglement.ae_min_cm2 is not None and entanglement.ae_max_cm2 is not None:
                bracket = (
                    sigma_e_estimate(sample.sigma_c_gm, te, entanglement.ae_max_cm2),
                    sigma_e_estimate(sample.sigma_c_gm, te, entanglement.ae_min_cm2),
                )
        else:
            notes.append("no entanglement parameters: sigma_E estimate skipped")

        if beam_laser is None:
            notes.append("no laser beam: QA^UB skipped")
        else:
            phi_min = minimum_classical_flux(sample, app, beam_laser)
            sigma_c_rel = sample.sigma_c_u_gm / sample.sigma_c_gm
            qa_rel = _relative(
                [
                    (sigma_c_rel, -0.5),
                    (budget.concentration, -0.5),
                    (budget.overlap, -0.5),
                    (budget.collection, -0.5),
                    (budget.beam_width, 1.0),
                    (budget.beam_width, 1.0),
                    (budget.pulse_duration, 1.0),
                    (budget.photon_rate, -1.0),
                ],
                k,
            )
            qa = UncertainValue.from_relative(phi_min / phi_spdc_max, qa_rel, k)

    logger.info(
        "xsection.bound_sample.computed",
        sample=sample.name,
        sigma_e_ub=ub,
        qa_ub=qa.value if qa else None,
        notes=len(notes),
    )
    return E2PABound(
        sample_name=sample.name,
        sigma_e_ub=UncertainValue.from_relative(ub, ub_rel, k),
        sigma_e_est=sigma_e_est,
        sigma_e_est_bracket=bracket,
        qa_ub=qa,
        phi_min_classical=phi_min,
        notes=notes,
    )
