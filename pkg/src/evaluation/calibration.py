"""
Monte-Carlo calibration of the analysis chain.

Each case draws synthetic chopper-modulated count records from the forward
models over many seeds, runs them through the same subtraction, fitting and
inversion code the CLI uses, and scores how often the result is right.
"""

import asyncio
from datetime import datetime
from typing import Any, Callable, Dict, List, Literal, Optional

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from ..models.apparatus import ApparatusSpec, BeamProfile
from ..models.config import RunConfig
from ..models.plan import SimPlan
from ..models.sample import SampleSpec
from ..models.uncertainty import UncertaintyBudget
from ..repositories.config_repository import ConfigRepository
from ..tools.sim import simulate_c2pef_run, simulate_e2pef_blocks, simulate_e2pef_run
from ..tools.stats import (
    background_subtract,
    combine_blocks,
    fluorescence_lower_bound,
    group_by_power,
    quadratic_slope,
)
from ..tools.xsection import extract_sigma_c, sigma_e_upper_bound
from ..utils.exceptions import ConfigError, DomainError

logger = structlog.get_logger("calibration")

# Poisson statistics do not depend on the binning, so a coarse chopper keeps trials cheap
CALIBRATION_CHOPPER_HZ = 0.1
CALIBRATION_BINS_PER_PERIOD = 4

CaseKind = Literal["sigma_c_recovery", "e2pef_power", "zero_signal"]


class CalibrationCase(BaseModel):
    """One Monte-Carlo check over a range of seeds."""

    model_config = ConfigDict(frozen=True)

    case_id: str
    kind: CaseKind
    description: str
    seeds: int = Field(100, ge=1)
    first_seed: int = 0
    required_rate: float = Field(..., gt=0, le=1)
    integration_s: float = Field(..., gt=0)
    background_cps: float = Field(0.0, ge=0)
    powers_uw: List[float] = Field(default_factory=list)
    repeats: int = Field(1, ge=1)
    blocks: int = Field(1, ge=1)
    f_lb_tolerance: float = Field(0.25, gt=0)


class CalibrationResult(BaseModel):
    """Outcome of one calibration case."""

    case_id: str
    passed: bool
    success_rate: float
    trials: int
    failed_trials: int = 0
    execution_time: float
    error: Optional[str] = None
    details: Dict[str, Any] = Field(default_factory=dict)
    timestamp: datetime = Field(default_factory=datetime.now)


class CalibrationSuite:
    """
    Runs the calibration cases for one sample and apparatus.

    Seeds run concurrently; every trial owns its generator.
    """

    def __init__(
        self,
        sample: SampleSpec,
        apparatus: ApparatusSpec,
        laser: BeamProfile,
        budget: Optional[UncertaintyBudget] = None,
    ):
        if sample.sigma_c_gm is None:
            raise DomainError(f"sample {sample.name!r} needs sigma_c_gm to plant a signal")
        self.sample = sample
        self.apparatus = apparatus
        self.laser = laser
        self.budget = budget or UncertaintyBudget()

    @classmethod
    def from_config(cls, config: RunConfig, sample_name: str) -> "CalibrationSuite":
        if sample_name not in config.samples:
            raise ConfigError([f"[sample.{sample_name}]: not in configuration"])
        if config.laser is None:
            raise ConfigError(["[laser]: missing"])
        sample = ConfigRepository().sample_spec(sample_name, config.samples[sample_name])
        return cls(sample, config.apparatus_spec(), config.laser.to_beam(), config.budget())

    def default_cases(self, seeds: int = 100) -> List[CalibrationCase]:
        f_lb = self.apparatus.f_lb_cps
        block_s = 45 * 60.0
        # background whose nine-block 2-sigma bound equals F_LB: (2/3) sqrt(2 B / (block_s/2))
        dark_cps = (1.5 * f_lb) ** 2 * block_s / 4.0
        return [
            CalibrationCase(
                case_id="sigma_c_recovery",
                kind="sigma_c_recovery",
                description="simulate, subtract, fit and invert recovers the planted sigma_C",
                seeds=seeds,
                required_rate=0.95,
                integration_s=60.0,
                background_cps=50.0,
                powers_uw=[4.0, 6.0, 8.0, 10.0, 12.0],
                repeats=3,
            ),
            CalibrationCase(
                case_id="e2pef_power",
                kind="e2pef_power",
                description="E2PEF at sigma_E^UB is seen at 2 sigma in one 45-minute block",
                seeds=seeds,
                required_rate=0.90,
                integration_s=block_s,
                background_cps=1.0,
            ),
            CalibrationCase(
                case_id="zero_signal",
                kind="zero_signal",
                description="nine 45-minute dark blocks reproduce F_LB and stay below it",
                seeds=seeds,
                required_rate=0.90,
                integration_s=block_s,
                background_cps=dark_cps,
                blocks=9,
            ),
        ]

    def _plan(self, case: CalibrationCase, beam: BeamProfile, seed: int) -> SimPlan:
        return SimPlan(
            sample=self.sample,
            apparatus=self.apparatus,
            beam=beam,
            powers_uw=case.powers_uw,
            integration_s=case.integration_s,
            chopper_hz=CALIBRATION_CHOPPER_HZ,
            bins_per_period=CALIBRATION_BINS_PER_PERIOD,
            background_cps=case.background_cps,
            rng_seed=seed,
            repeats=case.repeats,
            blocks=case.blocks,
        )

    def _sigma_c_trial(self, case: CalibrationCase, seed: int) -> Dict[str, Any]:
        plan = self._plan(case, self.laser, seed)
        points = group_by_power(simulate_c2pef_run(plan, np.random.default_rng(seed)))
        slope = quadratic_slope(points, coverage_k=self.budget.coverage_k)
        result = extract_sigma_c(slope, self.sample, self.apparatus, self.laser, self.budget)
        planted = float(self.sample.sigma_c_gm or 0.0)
        error = abs(result.sigma_c.value - planted)
        return {
            "ok": error <= 2.0 * result.sigma_c.expanded,
            "value": result.sigma_c.value,
            "relative_error": error / planted,
        }

    def _power_trial(self, case: CalibrationCase, seed: int) -> Dict[str, Any]:
        plan = self._plan(case, self.apparatus.spdc_beam(), seed)
        sigma_e = sigma_e_upper_bound(self.sample, self.apparatus)
        series = simulate_e2pef_run(plan, sigma_e, np.random.default_rng(seed))
        rate, sigma = background_subtract(series)
        return {"ok": rate > fluorescence_lower_bound(sigma), "value": rate}

    def _zero_signal_trial(self, case: CalibrationCase, seed: int) -> Dict[str, Any]:
        plan = self._plan(case, self.apparatus.spdc_beam(), seed)
        blocks = [
            background_subtract(s)
            for s in simulate_e2pef_blocks(plan, 0.0, np.random.default_rng(seed))
        ]
        rate, sigma = combine_blocks([r for r, _ in blocks], [s for _, s in blocks])
        f_lb = fluorescence_lower_bound(sigma)
        target = self.apparatus.f_lb_cps
        return {
            "ok": abs(f_lb - target) <= case.f_lb_tolerance * target and abs(rate) <= f_lb,
            "value": f_lb,
            "rate": rate,
        }

    def _trial(self, case: CalibrationCase) -> Callable[[CalibrationCase, int], Dict[str, Any]]:
        return {
            "sigma_c_recovery": self._sigma_c_trial,
            "e2pef_power": self._power_trial,
            "zero_signal": self._zero_signal_trial,
        }[case.kind]

    async def run_case(self, case: CalibrationCase) -> CalibrationResult:
        """Run every seed of ``case`` concurrently and score the outcomes."""
        start_time = datetime.now()
        trial = self._trial(case)
        seeds = range(case.first_seed, case.first_seed + case.seeds)
        try:
            outcomes = await asyncio.gather(
                *(asyncio.to_thread(trial, case, seed) for seed in seeds),
                return_exceptions=True,
            )
        except Exception as e:
            logger.error("calibration.case.error", case_id=case.case_id, error=str(e))
            return CalibrationResult(
                case_id=case.case_id,
                passed=False,
                success_rate=0.0,
                trials=0,
                execution_time=(datetime.now() - start_time).total_seconds(),
                error=str(e),
            )

        failed = [o for o in outcomes if isinstance(o, BaseException)]
        for error in failed[:3]:
            logger.warning("calibration.trial_failed", case_id=case.case_id, error=str(error))
        good = [o for o in outcomes if not isinstance(o, BaseException)]
        successes = sum(1 for o in good if o["ok"])
        values = np.array([o["value"] for o in good], dtype=float)
        success_rate = successes / len(outcomes)

        result = CalibrationResult(
            case_id=case.case_id,
            passed=success_rate >= case.required_rate,
            success_rate=success_rate,
            trials=len(outcomes),
            failed_trials=len(failed),
            execution_time=(datetime.now() - start_time).total_seconds(),
            details={
                "required_rate": case.required_rate,
                "mean_value": float(values.mean()) if values.size else None,
                "std_value": float(values.std(ddof=1)) if values.size > 1 else None,
            },
        )
        logger.info(
            "calibration.case.complete",
            case_id=case.case_id,
            success_rate=success_rate,
            passed=result.passed,
        )
        return result

    async def run_all(self, cases: Optional[List[CalibrationCase]] = None) -> Dict[str, Any]:
        """Run ``cases`` (default: every default case) and summarise."""
        cases = cases if cases is not None else self.default_cases()
        logger.info("calibration.suite.start", cases=len(cases), sample=self.sample.name)
        results = [await self.run_case(case) for case in cases]
        passed = sum(1 for r in results if r.passed)
        logger.info("calibration.suite.complete", passed=passed, total=len(results))
        return {
            "sample": self.sample.name,
            "passed": passed,
            "total": len(results),
            "results": results,
        }
