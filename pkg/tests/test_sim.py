"""Synthetic chopper-modulated acquisition."""

import numpy as np
import pytest

from src.models.plan import SimPlan
from src.models.series import ChopperPhase
from src.tools.sim import (
    period_phases,
    simulate_c2pef_run,
    simulate_e2pef_blocks,
    simulate_e2pef_run,
)
from src.tools.stats import background_subtract
from src.tools.xsection import c2pef_forward, sigma_e_upper_bound


@pytest.fixture
def plan(samples, apparatus, laser):
    return SimPlan(
        sample=samples["Rh6G"],
        apparatus=apparatus,
        beam=laser,
        powers_uw=[4.0, 8.0],
        integration_s=2.0,
        background_cps=50.0,
        rng_seed=20240517,
        repeats=3,
    )


def test_period_phases_layout(plan):
    phases = period_phases(plan)
    assert len(phases) == 40
    assert phases.count(ChopperPhase.TRANSITION) == 2
    assert phases.count(ChopperPhase.SIGNAL) == 19
    assert phases.count(ChopperPhase.BACKGROUND) == 19
    assert phases[0] == ChopperPhase.TRANSITION and phases[20] == ChopperPhase.TRANSITION


def test_scan_has_repeats_per_power(plan):
    runs = simulate_c2pef_run(plan)
    assert [s.power_uw for s in runs] == [4.0] * 3 + [8.0] * 3
    assert all(s.counts.size == 800 for s in runs)
    assert np.isclose(runs[0].duration_s, 2.0)


def test_same_seed_reproduces_the_run(plan):
    first = simulate_c2pef_run(plan)
    second = simulate_c2pef_run(plan)
    assert all(np.array_equal(a.counts, b.counts) for a, b in zip(first, second))


def test_different_seed_changes_the_run(plan):
    other = plan.model_copy(update={"rng_seed": 1})
    first = simulate_c2pef_run(plan)
    second = simulate_c2pef_run(other)
    assert not all(np.array_equal(a.counts, b.counts) for a, b in zip(first, second))


def test_dark_plan_draws_no_counts(plan):
    dark = plan.model_copy(update={"powers_uw": [0.0], "background_cps": 0.0})
    assert all(s.counts.sum() == 0 for s in simulate_c2pef_run(dark))


def test_subtracted_rate_recovers_the_forward_model(plan):
    long_plan = plan.model_copy(update={"powers_uw": [10.0], "integration_s": 60.0, "repeats": 1})
    (series,) = simulate_c2pef_run(long_plan)
    rate, sigma = background_subtract(series)
    expected = c2pef_forward(plan.sample, plan.apparatus, plan.beam, 10.0)
    assert abs(rate - expected) < 5.0 * sigma


def test_entangled_blocks_at_zero_cross_section(plan, apparatus):
    blocks_plan = plan.model_copy(
        update={"beam": apparatus.spdc_beam(), "blocks": 3, "integration_s": 20.0}
    )
    blocks = simulate_e2pef_blocks(blocks_plan, 0.0)
    assert len(blocks) == 3
    assert all(b.power_uw is None for b in blocks)
    for block in blocks:
        rate, sigma = background_subtract(block)
        assert abs(rate) < 5.0 * sigma


def test_entangled_run_at_upper_bound(plan, apparatus):
    run_plan = plan.model_copy(
        update={"beam": apparatus.spdc_beam(), "integration_s": 20.0, "background_cps": 0.0}
    )
    sigma_e = sigma_e_upper_bound(plan.sample, apparatus) * 1e4
    series = simulate_e2pef_run(run_plan, sigma_e)
    rate, sigma = background_subtract(series)
    assert abs(rate - 0.22 * 1e4) < 5.0 * sigma


def test_plan_needs_even_bins(samples, apparatus, laser):
    with pytest.raises(ValueError):
        SimPlan(
            sample=samples["Rh6G"],
            apparatus=apparatus,
            beam=laser,
            integration_s=1.0,
            bins_per_period=41,
        )
