"""Synthetic acquisition, count-series fitting and stability analysis."""

import asyncio
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
import structlog

from ..models.config import RunConfig
from ..models.series import CountSeries
from ..repositories.config_repository import ConfigRepository
from ..repositories.report_repository import ReportEmitter
from ..repositories.series_repository import SeriesRepository
from ..tools.sim import simulate_c2pef_run, simulate_e2pef_blocks
from ..tools.stats import (
    allan_deviation,
    background_subtract,
    combine_blocks,
    fit_power_law,
    fluorescence_lower_bound,
    group_by_power,
    optimal_integration_time,
    quadratic_slope,
)
from ..tools.xsection import extract_sigma_c
from ..utils.exceptions import ConfigError, DataFormatError

logger = structlog.get_logger("acquisition_service")


class AcquisitionService:
    """Drives the synthetic experiment and the analysis of recorded count series."""

    DEFAULT_TAUS_S = (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000)

    def __init__(
        self,
        config_repo: Optional[ConfigRepository] = None,
        series_repo: Optional[SeriesRepository] = None,
    ):
        self.config_repo = config_repo or ConfigRepository()
        self.series_repo = series_repo or SeriesRepository()

    async def simulate(self, emitter: ReportEmitter, config: RunConfig) -> Dict[str, Any]:
        """
        Generate count-series files from the ``[sim]`` plan.

        Args:
            emitter: Report sink; its output directory receives the series files
            config: Run configuration with a ``[sim]`` section

        Returns:
            Dict with the written paths and the expected signal rates
        """
        try:
            sim = config.sim
            problems = []
            if sim is None:
                problems.append("[sim]: missing")
            elif sim.sample not in config.samples:
                problems.append(f"[sim] sample: no [sample.{sim.sample}] section")
            elif sim.mode == "c2pef" and config.laser is None:
                problems.append("[laser]: missing, needed for a c2pef plan")
            if emitter.out_dir is None:
                problems.append("--out: simulate needs an output directory")
            if problems:
                raise ConfigError(problems)
            assert sim is not None and emitter.out_dir is not None

            sample = await asyncio.to_thread(
                self.config_repo.sample_spec, sim.sample, config.samples[sim.sample]
            )
            app = config.apparatus_spec()
            beam = config.laser.to_beam() if sim.mode == "c2pef" and config.laser else None
            plan = sim.to_plan(sample, app, beam or app.spdc_beam())

            if sim.mode == "c2pef":
                series = await asyncio.to_thread(simulate_c2pef_run, plan)
            else:
                series = await asyncio.to_thread(simulate_e2pef_blocks, plan, sim.sigma_e_cm2)
            paths = self.series_repo.save_many(series, emitter.out_dir, sim.mode, plan.rng_seed)
            for path in paths:
                emitter.note_file(path)

            emitter.provenance(
                {
                    **{f"sim.{k}": v for k, v in sim.model_dump().items()},
                    **{f"apparatus.{k}": v for k, v in config.apparatus.model_dump().items()},
                    **{f"sample.{sim.sample}.{k}": v for k, v in sample.model_dump().items()},
                }
            )
            emitter.section("simulate")
            emitter.values(
                {
                    "mode": sim.mode,
                    "series": len(paths),
                    "bins_per_series": series[0].counts.size if series else 0,
                    "rng_seed": plan.rng_seed,
                }
            )
            emitter.table(
                "simulated_series",
                pd.DataFrame(
                    {
                        "file": [path.name for path in paths],
                        "label": [s.label for s in series],
                        "counts": [int(s.counts.sum()) for s in series],
                    }
                ),
                write_csv=False,
            )
            logger.info(
                "acquisition_service.simulate.complete",
                mode=sim.mode,
                series=len(paths),
                seed=plan.rng_seed,
            )
            return {"paths": paths, "series": series, "plan": plan}
        except Exception as e:
            logger.error("acquisition_service.simulate.error", error=str(e))
            raise

    def _check_seeds(self, pattern: str, config: RunConfig) -> None:
        if config.sim is None:
            return
        seeds = self.series_repo.seeds(pattern)
        mismatched = [
            path for path, seed in seeds.items() if seed is not None and seed != config.sim.rng_seed
        ]
        if mismatched:
            raise ConfigError(
                [
                    f"{path}: rng_seed {seeds[path]} does not match [sim] rng_seed "
                    f"{config.sim.rng_seed}"
                    for path in mismatched
                ]
            )

    async def fit(
        self,
        emitter: ReportEmitter,
        series_glob: str,
        config: Optional[RunConfig] = None,
        sample_name: Optional[str] = None,
    ) -> Dict[str, Any]:
        """
        Analyse recorded count series.

        Series that carry a power form a classical power scan: background
        subtraction, the power-law fit with its acceptance gate, the quadratic
        slope and, with a configuration, sigma_C. Series without a power are
        entangled-excitation blocks: their rates are combined and F^LB reported.

        Args:
            emitter: Report sink
            series_glob: Glob pattern of count-series files
            config: Run configuration; enables the seed check and sigma_C
            sample_name: Sample to extract sigma_C for; defaults to the ``[sim]`` sample

        Returns:
            Dict of the fitted quantities
        """
        try:
            if config is not None:
                self._check_seeds(series_glob, config)
            series = await asyncio.to_thread(self.series_repo.load_glob, series_glob)
            with_power = [s for s in series if s.power_uw is not None]
            if with_power and len(with_power) != len(series):
                raise DataFormatError(
                    "series files mix power scans and power-less blocks", series_glob
                )

            emitter.provenance(
                {
                    "series_glob": series_glob,
                    "series_files": len(series),
                    "sample": sample_name or "-",
                }
            )
            if with_power:
                result = await asyncio.to_thread(
                    self._fit_scan, emitter, series, config, sample_name
                )
            else:
                result = self._combine(emitter, series, config)
            summary = {key: result[key] for key in ("exponent", "rate_cps") if key in result}
            logger.info("acquisition_service.fit.complete", series=len(series), **summary)
            return result
        except Exception as e:
            logger.error("acquisition_service.fit.error", pattern=series_glob, error=str(e))
            raise

    def _fit_scan(
        self,
        emitter: ReportEmitter,
        series: Sequence[CountSeries],
        config: Optional[RunConfig],
        sample_name: Optional[str],
    ) -> Dict[str, Any]:
        transition = config.sim.transition_fraction if config and config.sim else 0.05
        coverage_k = config.run.coverage_k if config else 2.0
        points = group_by_power(series, transition)
        fit = fit_power_law(points)
        slope = quadratic_slope(points, coverage_k=coverage_k)

        emitter.table("rate_points", pd.DataFrame([p.model_dump() for p in points]))
        emitter.section("power_law")
        emitter.values(
            {
                "amplitude": fit.amplitude,
                "amplitude_sigma": fit.amplitude_sigma,
                "exponent": fit.exponent,
                "exponent_sigma": fit.exponent_sigma,
                "points": fit.n_points,
                "excluded": fit.n_excluded,
                "accepted": fit.accepted,
                "quadratic_slope": slope.value,
                "quadratic_slope_expanded": slope.expanded,
            }
        )
        result: Dict[str, Any] = {
            "points": points,
            "fit": fit,
            "exponent": fit.exponent,
            "accepted": fit.accepted,
            "slope": slope,
        }

        name = sample_name or (config.sim.sample if config and config.sim else None)
        if config is None or name is None:
            emitter.line("note: no configuration and sample; sigma_C not extracted")
            return result
        if name not in config.samples:
            raise ConfigError([f"[sample.{name}]: not in configuration"])
        if config.laser is None:
            raise ConfigError(["[laser]: missing"])

        sample = self.config_repo.sample_spec(name, config.samples[name])
        c2pa = extract_sigma_c(
            slope,
            sample,
            config.apparatus_spec(),
            config.laser.to_beam(),
            config.budget(),
            fit_exponent=fit.exponent,
        )
        emitter.section("sigma_c")
        emitter.values(
            {
                "sample": name,
                "sigma_c_gm": c2pa.sigma_c.value,
                "sigma_c_expanded_gm": c2pa.sigma_c.expanded,
                "accepted": c2pa.accepted,
            }
        )
        if not c2pa.accepted:
            emitter.line(f"note: exponent {fit.exponent:.3f} outside the quadratic band")
        result["sigma_c"] = c2pa
        return result

    def _combine(
        self, emitter: ReportEmitter, series: Sequence[CountSeries], config: Optional[RunConfig]
    ) -> Dict[str, Any]:
        transition = config.sim.transition_fraction if config and config.sim else 0.05
        coverage_k = config.run.coverage_k if config else 2.0
        blocks = [background_subtract(s, transition) for s in series]
        rates = [rate for rate, _ in blocks]
        sigmas = [sigma for _, sigma in blocks]
        rate, sigma = combine_blocks(rates, sigmas)
        f_lb = fluorescence_lower_bound(sigma, coverage_k)

        emitter.table(
            "blocks",
            pd.DataFrame(
                {"label": [s.label for s in series], "rate_cps": rates, "sigma_cps": sigmas}
            ),
        )
        emitter.section("combined")
        emitter.values(
            {
                "rate_cps": rate,
                "sigma_cps": sigma,
                "f_lb_cps": f_lb,
                "live_time_s": float(sum(s.duration_s for s in series)),
                "distinguishable": abs(rate) > f_lb,
            }
        )
        return {"rate_cps": rate, "sigma_cps": sigma, "f_lb_cps": f_lb, "block_rates": rates}

    async def allan(
        self, emitter: ReportEmitter, rates_path: Path, taus: Optional[Sequence[float]] = None
    ) -> Dict[str, Any]:
        """Allan deviation of a rate record and the averaging time at its minimum."""
        try:
            rates, interval = await asyncio.to_thread(self.series_repo.load_rates, rates_path)
            taus = list(taus) if taus else [t for t in self.DEFAULT_TAUS_S if t >= interval]
            points: List = await asyncio.to_thread(allan_deviation, rates, interval, taus)
            emitter.provenance(
                {"rates": rates_path, "interval_s": interval, "samples": rates.size, "taus": taus}
            )
            emitter.table("allan", pd.DataFrame(points, columns=["tau_s", "deviation_cps"]))
            best = optimal_integration_time(points)
            emitter.section("allan")
            emitter.values({"mean_rate_cps": float(np.mean(rates)), "optimal_tau_s": best})
            logger.info("acquisition_service.allan.complete", optimal_tau_s=best, taus=len(points))
            return {"points": points, "optimal_tau_s": best}
        except Exception as e:
            logger.error("acquisition_service.allan.error", path=str(rates_path), error=str(e))
            raise
