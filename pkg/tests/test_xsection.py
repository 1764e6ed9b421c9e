"""Forward fluorescence models, sigma_C extraction and the E2PA bounds."""

import math

import pytest

from src.models.results import EntanglementParams
from src.models.uncertainty import UncertainValue
from src.tools.optics import peak_flux, power_for_peak_flux
from src.tools.xsection import (
    attenuation_scan,
    bound_sample,
    c2pef_forward,
    crossover_flux,
    e2pa_rate,
    e2pef_diagonals,
    expected_e2pef,
    extract_sigma_c,
    minimum_classical_flux,
    required_entanglement_area,
    sigma_e_estimate,
    sigma_e_upper_bound,
)
from src.utils.exceptions import DomainError, SingularityError

PUBLISHED_UPPER_BOUNDS = {
    "AF455": 2.1e-25,
    "Qdot605": 480e-25,
    "Fluorescein": 1.0e-25,
    "Rh6G": 1.2e-25,
    "C153": 1.6e-25,
    "9R-S": 20e-25,
}


@pytest.mark.parametrize("name, published", sorted(PUBLISHED_UPPER_BOUNDS.items()))
def test_upper_bound_reproduces_published_value(samples, apparatus, name, published):
    ub = sigma_e_upper_bound(samples[name], apparatus)
    assert abs(ub / published - 1.0) < 0.15


@pytest.mark.parametrize("name", sorted(PUBLISHED_UPPER_BOUNDS))
def test_rate_at_upper_bound_is_the_detection_limit(samples, apparatus, name):
    ub = sigma_e_upper_bound(samples[name], apparatus)
    assert math.isclose(expected_e2pef(ub, samples[name], apparatus), 0.22, rel_tol=1e-9)


@pytest.mark.parametrize(
    "name, sigma_e, expected",
    [("9R-S", 2.4e-19, 2.6e4), ("Rh6G", 1.5e-21, 2.7e3)],
)
def test_expected_rate_for_reported_cross_sections(samples, apparatus, name, sigma_e, expected):
    rate = expected_e2pef(sigma_e, samples[name], apparatus)
    assert abs(rate / expected - 1.0) < 0.20


def test_upper_bound_names_the_vanishing_factor(samples, apparatus):
    no_rate = apparatus.model_copy(update={"photon_rate": None})
    with pytest.raises(SingularityError) as info:
        sigma_e_upper_bound(samples["Rh6G"], no_rate)
    assert info.value.factor == "Q"


def test_sigma_e_estimate():
    assert math.isclose(sigma_e_estimate(13.0, 1620.0, 2.1e-8), 3.82e-30, rel_tol=2e-3)
    assert math.isclose(sigma_e_estimate(660.0, 1620.0, 2.1e-8), 1.94e-28, rel_tol=5e-3)
    with pytest.raises(SingularityError):
        sigma_e_estimate(13.0, 0.0, 2.1e-8)


@pytest.mark.parametrize(
    "sigma_c, sigma_e, te, area_um2",
    [(9.9, 0.0099e-19, 140.0, 72e-9), (27.9, 2.02e-19, 100.0, 1.4e-9)],
)
def test_required_entanglement_area(sigma_c, sigma_e, te, area_um2):
    assert abs(required_entanglement_area(sigma_c, sigma_e, te) / area_um2 - 1.0) < 0.02


def test_e2pa_terms_balance_at_crossover():
    phi = crossover_flux(1e-21, 51.0)
    assert math.isclose(e2pa_rate(1e-21, 0.0, phi), e2pa_rate(0.0, 51.0, phi), rel_tol=1e-12)
    with pytest.raises(SingularityError):
        crossover_flux(1e-21, 0.0)


def test_c2pef_is_quadratic_in_power(samples, apparatus, laser):
    one = c2pef_forward(samples["Rh6G"], apparatus, laser, 1.0)
    assert one > 0
    assert math.isclose(c2pef_forward(samples["Rh6G"], apparatus, laser, 3.0), 9.0 * one)
    with pytest.raises(DomainError):
        c2pef_forward(samples["Rh6G"], apparatus, laser, -1.0)


def test_af455_rate_at_lowest_measurable_flux(samples, apparatus, laser):
    power = power_for_peak_flux(laser, 8.5e20)
    rate = c2pef_forward(samples["AF455"], apparatus, laser, power)
    assert abs(rate / 0.22 - 1.0) < 0.25


def test_extract_sigma_c_inverts_forward_model(samples, apparatus, laser, budget):
    sample = samples["Rh6G"]
    slope = c2pef_forward(sample, apparatus, laser, 1.0)
    result = extract_sigma_c(slope, sample, apparatus, laser, budget)
    assert math.isclose(result.sigma_c.value, 51.0, rel_tol=1e-9)
    assert math.isclose(result.sigma_c.relative, 0.1393, rel_tol=2e-3)
    assert math.isclose(result.sigma_c.expanded / result.sigma_c.value, 0.2786, rel_tol=2e-3)
    assert result.accepted


def test_extract_sigma_c_uses_fit_uncertainty_and_gate(samples, apparatus, laser, budget):
    sample = samples["Rh6G"]
    slope = UncertainValue(value=2.0, std_uncertainty=0.0)
    with_fit = UncertainValue(value=2.0, std_uncertainty=0.02)
    rel_default = extract_sigma_c(slope, sample, apparatus, laser, budget).sigma_c.relative
    rel_fit = extract_sigma_c(with_fit, sample, apparatus, laser, budget).sigma_c.relative
    assert rel_fit < rel_default
    rejected = extract_sigma_c(with_fit, sample, apparatus, laser, budget, fit_exponent=1.8)
    assert not rejected.accepted
    with pytest.raises(DomainError):
        extract_sigma_c(0.0, sample, apparatus, laser, budget)


@pytest.mark.parametrize("name, published", [("AF455", 410.0), ("Fluorescein", 2000.0)])
def test_quantum_advantage_bound(samples, apparatus, laser, spdc_beam, budget, name, published):
    bound = bound_sample(samples[name], apparatus, laser, peak_flux(spdc_beam), budget=budget)
    assert bound.qa_ub is not None
    assert abs(bound.qa_ub.value / published - 1.0) < 0.35


def test_minimum_classical_flux_reaches_detection_limit(samples, apparatus, laser):
    sample = samples["Rh6G"]
    phi_min = minimum_classical_flux(sample, apparatus, laser)
    power = math.sqrt(apparatus.f_lb_cps / c2pef_forward(sample, apparatus, laser, 1.0))
    assert math.isclose(phi_min, peak_flux(laser.with_power_uw(power)), rel_tol=1e-9)


def test_bound_sample_uncertainty_and_bracket(samples, apparatus, laser, spdc_beam, budget):
    entanglement = EntanglementParams(
        te_fs=1620.0, ae_cm2=2.1e-8, ae_min_cm2=1.0e-8, ae_max_cm2=4.0e-8
    )
    bound = bound_sample(
        samples["Fluorescein"], apparatus, laser, peak_flux(spdc_beam), entanglement, budget
    )
    assert math.isclose(bound.sigma_e_ub.relative, 0.1196, rel_tol=2e-3)
    assert math.isclose(bound.sigma_e_ub.expanded / bound.sigma_e_ub.value, 0.2392, rel_tol=2e-3)
    low, high = bound.sigma_e_est_bracket
    assert low < bound.sigma_e_est < high
    assert bound.notes == []


def test_bound_without_sigma_c_is_noted(samples, apparatus, spdc_beam):
    sample = samples["C153"].model_copy(update={"sigma_c_gm": None})
    bound = bound_sample(sample, apparatus, None, peak_flux(spdc_beam))
    assert bound.qa_ub is None and bound.sigma_e_est is None
    assert any("sigma_C absent" in note for note in bound.notes)


def test_e2pef_diagonals_are_linear_in_mu(samples, apparatus):
    sample = samples["Rh6G"]
    points = e2pef_diagonals(sample, apparatus, sigma_e_values=[1e-21], mu_values=[1.0, 10.0])
    assert len(points) == 2
    assert math.isclose(points[1].rate_cps, 10.0 * points[0].rate_cps, rel_tol=1e-12)
    assert len(e2pef_diagonals(sample, apparatus)) == 5 * 13


def test_pump_attenuation_separates_the_two_terms():
    full, tenth = attenuation_scan(1e-21, 51.0, 1e18, [1.0, 0.1], mode="pump")
    assert math.isclose(tenth.linear_term, 0.1 * full.linear_term, rel_tol=1e-12)
    assert math.isclose(tenth.quadratic_term, 0.01 * full.quadratic_term, rel_tol=1e-12)
    with pytest.raises(DomainError):
        attenuation_scan(1e-21, 51.0, 1e18, [1.0], mode="sideways")
