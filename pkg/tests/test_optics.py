"""Beam geometry, peak flux and collection efficiency."""

import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from src.models.apparatus import BeamProfile, CollectionModel
from src.tools.optics import (
    beam_fwhm_at,
    calibrate_kappa_min,
    collection_integral,
    collection_k,
    collection_line_average,
    effective_area,
    excitations_per_photon,
    flux_form_discrepancy,
    flux_per_photon,
    flux_profile,
    geometric_overlap_integral,
    mean_photons_per_pulse,
    one_photon_fluorescence,
    peak_flux,
    peak_flux_from_mu,
    peak_flux_uncertainty,
    power_for_peak_flux,
    rescale_collection,
)
from src.utils.exceptions import DomainError
from src.utils.units import FS_TO_S, UM_TO_CM


def test_beam_widens_by_root_two_at_rayleigh_range(spdc_beam):
    assert math.isclose(beam_fwhm_at(spdc_beam, 0.4, "x"), 51.0 * math.sqrt(2.0))
    assert math.isclose(beam_fwhm_at(spdc_beam, -0.4, "y"), 84.0 * math.sqrt(2.0))
    with pytest.raises(DomainError):
        beam_fwhm_at(spdc_beam, 0.0, "z")


def test_effective_area_of_entangled_beam(spdc_beam):
    assert math.isclose(effective_area(spdc_beam), 9.71e-5, rel_tol=2e-3)


def test_entangled_peak_flux(spdc_beam):
    assert math.isclose(mean_photons_per_pulse(spdc_beam), 111.25, rel_tol=1e-9)
    assert abs(peak_flux(spdc_beam) / 2.1e18 - 1.0) < 0.03


def test_laser_focuses_more_flux_per_photon(laser, spdc_beam):
    ratio = flux_per_photon(laser) / flux_per_photon(spdc_beam)
    assert math.isclose(ratio, 16.72, rel_tol=1e-3)


def test_power_for_peak_flux_inverts_peak_flux(laser):
    assert math.isclose(power_for_peak_flux(laser, peak_flux(laser)), 10.5, rel_tol=1e-9)


def test_peak_flux_from_mu_scales_linearly(spdc_beam):
    assert math.isclose(
        peak_flux_from_mu(spdc_beam, 2.0), 2.0 * flux_per_photon(spdc_beam), rel_tol=1e-12
    )
    with pytest.raises(DomainError):
        peak_flux_from_mu(spdc_beam, -1.0)


def test_mode_form_differs_by_root_pi(spdc_beam):
    assert math.isclose(flux_form_discrepancy(spdc_beam), math.sqrt(math.pi), rel_tol=1e-9)


def test_flux_profile_halves_at_half_width(laser):
    center = flux_profile(laser, 0.0, 0.0, 0.0, 0.0)
    assert math.isclose(center, peak_flux(laser), rel_tol=1e-12)
    edge = flux_profile(laser, laser.fwhm_x0_um / 2.0, 0.0, 0.0, 0.0)
    assert math.isclose(edge / center, 0.5, rel_tol=1e-9)


def test_peak_flux_uncertainty_adds_in_quadrature(spdc_beam):
    result = peak_flux_uncertainty(spdc_beam, 111.25, 0.08, 0.05, 0.05, 0.05, coverage_k=2.0)
    assert math.isclose(result.value, peak_flux(spdc_beam), rel_tol=1e-9)
    assert math.isclose(result.relative, math.sqrt(0.08**2 + 3 * 0.05**2), rel_tol=1e-9)
    assert math.isclose(result.expanded, 2.0 * result.std_uncertainty)


def test_collection_plateau_and_edges():
    model = CollectionModel(kappa_max=0.154, alpha_per_mm=2.78, z0_mm=1.51)
    k = collection_k(model, np.array([0.0, 1.51, -1.51, 5.0]))
    assert math.isclose(k[0], 0.154, rel_tol=1e-6)
    assert np.allclose(k[1:3], 0.077)
    assert k[3] < 1e-6


def test_collection_line_average_over_cuvette():
    model = CollectionModel(kappa_max=0.202, alpha_per_mm=2.78, z0_mm=1.51)
    assert abs(collection_line_average(model, 5.0) - 0.061) < 0.002


def test_rescale_collection_to_measured_minimum():
    model = rescale_collection(0.0465, 0.061, 0.202)
    assert math.isclose(model.kappa_max, 0.154, rel_tol=2e-3)
    assert model.alpha_per_mm == 2.78 and model.z0_mm == 1.51


def test_collection_integral_in_cm():
    model = CollectionModel(kappa_max=0.154, alpha_per_mm=2.78, z0_mm=1.51)
    # plateau of 2 z0 = 3.02 mm at kappa_max
    assert math.isclose(collection_integral(model, 5.0), 0.154 * 0.302, rel_tol=1e-3)
    with pytest.raises(DomainError):
        collection_integral(model, 0.0)


def test_geometric_overlap_of_collimated_beam():
    model = CollectionModel(kappa_max=0.154, alpha_per_mm=2.78, z0_mm=1.51)
    beam = BeamProfile(
        fwhm_x0_um=50.0,
        fwhm_y0_um=50.0,
        rayleigh_mm=1e6,
        pulse_fwhm_fs=100.0,
        rep_rate_hz=8e7,
        photon_energy_j=2.45e-19,
        avg_power_w=1e-5,
    )
    expected = collection_integral(model, 5.0) / (50e-4 * 50e-4)
    assert math.isclose(geometric_overlap_integral(model, beam, 5.0), expected, rel_tol=1e-6)


def test_excitations_per_photon_at_unit_density():
    assert math.isclose(excitations_per_photon(1e4, 1e-4, 1.0), 0.9, rel_tol=1e-12)


def test_kappa_min_calibration_round_trip():
    f1 = one_photon_fluorescence(0.05, 0.1, 1e-6, 2.45e-19, 0.04)
    assert math.isclose(calibrate_kappa_min(f1, 0.1, 1e-6, 2.45e-19, 0.04), 0.05, rel_tol=1e-12)


def test_beam_requires_power_or_rate():
    with pytest.raises(ValueError):
        BeamProfile(
            fwhm_x0_um=50.0,
            fwhm_y0_um=50.0,
            rayleigh_mm=1.0,
            pulse_fwhm_fs=100.0,
            rep_rate_hz=8e7,
            photon_energy_j=2.45e-19,
        )


@pytest.mark.parametrize("z_mm", [-1.2, -0.4, 0.3, 2.0])
def test_peak_flux_times_area_is_constant_along_z(spdc_beam, z_mm):
    at_focus = peak_flux(spdc_beam) * effective_area(spdc_beam)
    assert math.isclose(
        peak_flux(spdc_beam, z_mm) * effective_area(spdc_beam, z_mm), at_focus, rel_tol=1e-12
    )


@pytest.mark.parametrize("z_mm", [0.0, 0.7])
def test_flux_profile_integrates_to_photons_per_pulse(spdc_beam, z_mm):
    span = np.linspace(-3.0, 3.0, 121)
    x = span * beam_fwhm_at(spdc_beam, z_mm, "x")
    y = span * beam_fwhm_at(spdc_beam, z_mm, "y")
    t = span * spdc_beam.pulse_fwhm_fs
    xx, yy, tt = np.meshgrid(x, y, t, indexing="ij")
    values = flux_profile(spdc_beam, xx, yy, z_mm, tt)
    integral = trapezoid(trapezoid(trapezoid(values, t, axis=2), y, axis=1), x)
    integral *= UM_TO_CM**2 * FS_TO_S
    assert math.isclose(integral, mean_photons_per_pulse(spdc_beam), rel_tol=1e-4)
