"""Computation tools: pure functions over the domain models."""

from .jsi import (
    apply_dispersion_and_transform,
    coincidence_ratio,
    coincidence_ratio_curve,
    entanglement_time,
    marginal_pulse_fwhm,
    resample_to_frequency,
    synthesize_gaussian_jsi,
    tof_wavelength_map,
)
from .optics import (
    calibrate_kappa_min,
    collection_k,
    collection_integral,
    effective_area,
    peak_flux,
    peak_flux_from_mu,
    rescale_collection,
)
from .photon_stats import (
    click_probability,
    dead_time_correct,
    extrapolate_mu,
    invert_mu,
    multimode_distribution,
    mu_chain,
    smsv_distribution,
)
from .sim import simulate_c2pef_run, simulate_e2pef_blocks, simulate_e2pef_run
from .spectral_overlap import spectral_overlap, spectral_overlap_ratio
from .stats import (
    allan_deviation,
    background_subtract,
    error_bar,
    fit_power_law,
    propagate,
    quadratic_slope,
)
from .xsection import (
    bound_sample,
    c2pef_forward,
    e2pa_rate,
    expected_e2pef,
    extract_sigma_c,
    quantum_advantage_ub,
    required_entanglement_area,
    sigma_e_estimate,
    sigma_e_upper_bound,
)

__all__ = [
    "apply_dispersion_and_transform",
    "coincidence_ratio",
    "coincidence_ratio_curve",
    "entanglement_time",
    "marginal_pulse_fwhm",
    "resample_to_frequency",
    "synthesize_gaussian_jsi",
    "tof_wavelength_map",
    "calibrate_kappa_min",
    "collection_k",
    "collection_integral",
    "effective_area",
    "peak_flux",
    "peak_flux_from_mu",
    "rescale_collection",
    "click_probability",
    "dead_time_correct",
    "extrapolate_mu",
    "invert_mu",
    "multimode_distribution",
    "mu_chain",
    "smsv_distribution",
    "simulate_c2pef_run",
    "simulate_e2pef_blocks",
    "simulate_e2pef_run",
    "spectral_overlap",
    "spectral_overlap_ratio",
    "allan_deviation",
    "background_subtract",
    "error_bar",
    "fit_power_law",
    "propagate",
    "quadratic_slope",
    "bound_sample",
    "c2pef_forward",
    "e2pa_rate",
    "expected_e2pef",
    "extract_sigma_c",
    "quantum_advantage_ub",
    "required_entanglement_area",
    "sigma_e_estimate",
    "sigma_e_upper_bound",
]
