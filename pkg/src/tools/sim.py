"""
Synthetic Acquisition Tools
Chopper-modulated Poisson count streams drawn from the forward fluorescence
models, so the subtraction, fit and extraction chain can be checked end to end.

Counts are drawn per bin, not per laser pulse. Each chopper period is split
into an open (signal) half and a closed (background) half; the first bins of
each half are transition bins at background plus half the signal rate.
"""

from typing import List, Optional

import numpy as np
import structlog

from ..models.plan import SimPlan
from ..models.series import ChopperPhase, CountSeries
from .xsection import c2pef_forward, expected_e2pef

logger = structlog.get_logger("sim")


def period_phases(plan: SimPlan) -> List[ChopperPhase]:
    """Phase label of each bin within one chopper period."""
    half = plan.bins_per_period // 2
    edge = plan.transition_bins_per_edge
    phases = []
    for index in range(plan.bins_per_period):
        position = index % half
        if position < edge:
            phases.append(ChopperPhase.TRANSITION)
        elif index < half:
            phases.append(ChopperPhase.SIGNAL)
        else:
            phases.append(ChopperPhase.BACKGROUND)
    return phases


def chopper_series(
    plan: SimPlan,
    signal_cps: float,
    rng: np.random.Generator,
    power_uw: Optional[float] = None,
    label: str = "",
) -> CountSeries:
    """
    One chopper-modulated count record of ``plan.integration_s`` seconds.

    Args:
        plan: Timing, chopper and background settings
        signal_cps: Detected signal rate while the chopper is open
        rng: Generator owned by the caller
        power_uw: Excitation power stored with the series
        label: Free-text label

    Returns:
        CountSeries with signal, background and transition bins
    """
    phases = period_phases(plan) * plan.periods
    n_bins = len(phases)
    rates = np.full(n_bins, plan.background_cps, dtype=float)
    phase_codes = np.array([p.value for p in phases])
    rates[phase_codes == ChopperPhase.SIGNAL.value] += signal_cps
    rates[phase_codes == ChopperPhase.TRANSITION.value] += 0.5 * signal_cps

    counts = rng.poisson(rates * plan.bin_width_s)
    edges = np.arange(n_bins + 1) * plan.bin_width_s
    return CountSeries(
        bin_edges=edges, counts=counts, phases=tuple(phases), power_uw=power_uw, label=label
    )


def simulate_c2pef_run(
    plan: SimPlan, rng: Optional[np.random.Generator] = None
) -> List[CountSeries]:
    """
    Classical power scan: ``plan.repeats`` series per power, in plan order.

    The same seed always yields the same series.
    """
    rng = rng if rng is not None else np.random.default_rng(plan.rng_seed)
    runs = []
    for power in plan.powers_uw:
        signal = c2pef_forward(plan.sample, plan.apparatus, plan.beam, power)
        for repeat in range(plan.repeats):
            runs.append(
                chopper_series(
                    plan,
                    signal,
                    rng,
                    power_uw=power,
                    label=f"{plan.sample.name} {power:g}uW #{repeat + 1}",
                )
            )
    logger.info(
        "sim.c2pef_run.generated",
        sample=plan.sample.name,
        powers=len(plan.powers_uw),
        repeats=plan.repeats,
        seed=plan.rng_seed,
    )
    return runs


def simulate_e2pef_run(
    plan: SimPlan, sigma_e_cm2: float, rng: Optional[np.random.Generator] = None
) -> CountSeries:
    """Entangled-excitation record at the apparatus photon rate; sigma_E = 0 is the null case."""
    rng = rng if rng is not None else np.random.default_rng(plan.rng_seed)
    signal = expected_e2pef(sigma_e_cm2, plan.sample, plan.apparatus)
    logger.debug("sim.e2pef_run.rate", sample=plan.sample.name, signal_cps=signal)
    return chopper_series(plan, signal, rng, label=f"{plan.sample.name} e2pef")


def simulate_e2pef_blocks(
    plan: SimPlan, sigma_e_cm2: float, rng: Optional[np.random.Generator] = None
) -> List[CountSeries]:
    """``plan.blocks`` consecutive entangled-excitation records from one generator."""
    rng = rng if rng is not None else np.random.default_rng(plan.rng_seed)
    signal = expected_e2pef(sigma_e_cm2, plan.sample, plan.apparatus)
    return [
        chopper_series(plan, signal, rng, label=f"{plan.sample.name} e2pef block {block + 1}")
        for block in range(plan.blocks)
    ]
