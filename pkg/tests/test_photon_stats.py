"""Photon-number statistics and the count-rate to mu chain."""

import math

import numpy as np
import pytest

from src.tools.photon_stats import (
    click_probability,
    click_probability_closed_form,
    dead_time_apply,
    dead_time_correct,
    estimate_mode_count,
    extrapolate_mu,
    fit_mu_line,
    g2_of_source,
    invert_mu,
    kappa2_from_sigma_c,
    mu_at_sample,
    mu_chain,
    multimode_distribution,
    smsv_distribution,
    smsv_tpa_rate,
    tpa_rate,
)
from src.utils.exceptions import (
    CutoffError,
    DomainError,
    SaturationError,
    SingularityError,
    UnreachableError,
)


@pytest.mark.parametrize("source, expected", [("coherent", 1.0), ("thermal", 2.0)])
def test_g2_of_classical_sources(source, expected):
    assert g2_of_source(source) == expected


def test_g2_of_squeezed_vacuum_needs_mu():
    assert math.isclose(g2_of_source("smsv", 0.5), 5.0)
    with pytest.raises(DomainError):
        g2_of_source("smsv")


@pytest.mark.parametrize("mu", [1e-3, 0.22, 4.0])
def test_smsv_rate_is_tpa_rate_with_its_g2(mu):
    kappa2 = 3.7e-4
    assert math.isclose(
        smsv_tpa_rate(kappa2, mu), tpa_rate(kappa2, mu, g2_of_source("smsv", mu)), rel_tol=1e-12
    )


def test_smsv_distribution_at_low_mu():
    dist = smsv_distribution(0.22)
    assert math.isclose(dist.probs[0], 1.0 / math.sqrt(1.22), rel_tol=1e-12)
    assert np.all(dist.probs[1::2] == 0.0)
    assert dist.tail_mass < 1e-9
    assert math.isclose(dist.mean(), 0.22, rel_tol=1e-6)


def test_explicit_cutoff_too_small_raises():
    with pytest.raises(CutoffError) as info:
        smsv_distribution(1.0, n_max=2)
    assert info.value.tail_mass > 1e-9


@pytest.mark.parametrize("modes", [2, 5, 40])
def test_multimode_distribution_preserves_the_mean(modes):
    dist = multimode_distribution(2.0, modes)
    assert dist.mode_count == modes
    assert math.isclose(dist.probs.sum(), 1.0, abs_tol=1e-9)
    assert math.isclose(dist.mean(), 2.0, rel_tol=1e-6)


@pytest.mark.parametrize("modes", [1, 3])
@pytest.mark.parametrize("eta", [0.1, 0.46, 1.0])
def test_click_probability_matches_closed_form(modes, eta):
    dist = multimode_distribution(0.8, modes)
    assert math.isclose(
        click_probability(dist, eta),
        click_probability_closed_form(0.8, modes, eta),
        rel_tol=1e-7,
    )


def test_dead_time_correction_and_its_inverse():
    corrected = dead_time_correct(0.055, 4)
    assert math.isclose(corrected, 0.055 / 0.78, rel_tol=1e-12)
    assert math.isclose(dead_time_apply(corrected, 4), 0.055, rel_tol=1e-12)


def test_dead_time_pole_raises():
    with pytest.raises(SaturationError):
        dead_time_correct(0.25, 4)


def test_invert_mu_round_trip():
    p = click_probability_closed_form(0.37, 4, 0.46)
    assert math.isclose(invert_mu(p, 0.46, 4), 0.37, rel_tol=1e-8)


def test_invert_mu_unreachable_probability():
    with pytest.raises(UnreachableError):
        invert_mu(0.99, 0.46, 1)


def test_mu_chain_single_mode():
    chain = mu_chain(4.4e6, 0.46, 52.0, 8e7)
    assert math.isclose(chain.p_meas, 0.055, rel_tol=1e-12)
    assert chain.n_dead == 4
    assert math.isclose(chain.p_corr, 0.0705, rel_tol=1e-3)
    assert abs(chain.mu - 0.22) < 0.005


def test_mu_chain_many_modes_lowers_mu():
    single = mu_chain(4.4e6, 0.46, 52.0, 8e7).mu
    many = mu_chain(4.4e6, 0.46, 52.0, 8e7, modes=100).mu
    assert many < single
    assert abs(many - 0.21) < 0.01


def test_mu_chain_saturated_detector():
    with pytest.raises(SaturationError):
        mu_chain(2e7, 0.46, 52.0, 8e7)


def test_extrapolate_mu_along_calibration_line():
    points = [(50.0, 0.22), (75.0, 0.33), (100.0, 0.44)]
    assert math.isclose(extrapolate_mu(points, 30000.0), 132.0, rel_tol=1e-9)
    slope, intercept = fit_mu_line(points)
    assert math.isclose(slope, 0.0044, rel_tol=1e-9)
    assert abs(intercept) < 1e-12


def test_fit_mu_line_needs_power_spread():
    with pytest.raises(SingularityError):
        fit_mu_line([(50.0, 0.2), (50.0, 0.3)])


def test_mu_at_sample_applies_path_loss():
    assert math.isclose(mu_at_sample(147.0, 0.24), 111.72, rel_tol=1e-12)
    with pytest.raises(DomainError):
        mu_at_sample(147.0, 1.0)


def test_mode_count_floor_is_one():
    assert estimate_mode_count(0.5, 2.0) == 1.0
    assert estimate_mode_count(76.0, 0.76) == pytest.approx(100.0)


def test_kappa2_needs_nonzero_duration_and_area():
    with pytest.raises(SingularityError):
        kappa2_from_sigma_c(51.0, 0.0, 1e-5)
    assert kappa2_from_sigma_c(51.0, 111.0, 1e-5) > 0


@pytest.mark.parametrize("modes", [1, 10])
def test_click_probability_matches_sampled_pulses(modes):
    dist = multimode_distribution(0.22, modes)
    eta = 0.46
    rng = np.random.default_rng(2024)
    pulses = 1_000_000
    photons = rng.choice(dist.probs.size, size=pulses, p=dist.probs / dist.probs.sum())
    clicked = rng.binomial(photons, eta) > 0
    expected = click_probability(dist, eta)
    standard_error = math.sqrt(expected * (1.0 - expected) / pulses)
    assert abs(clicked.mean() - expected) < 3.0 * standard_error
