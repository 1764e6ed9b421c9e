"""Per-sample E2PA bounds and classical cross-section extraction."""

import asyncio
from typing import Any, Dict, List, Optional

import pandas as pd
import structlog

from ..models.apparatus import ApparatusSpec, BeamProfile
from ..models.config import RunConfig, SampleSection
from ..models.results import E2PABound, EntanglementParams
from ..models.uncertainty import UncertaintyBudget, UncertainValue
from ..repositories.config_repository import ConfigRepository
from ..repositories.report_repository import ReportEmitter
from ..tools.optics import peak_flux
from ..tools.xsection import (
    bound_sample,
    e2pef_diagonals,
    expected_e2pef,
    extract_sigma_c,
    sigma_e_estimate,
)
from ..utils.exceptions import ConfigError

logger = structlog.get_logger("bounds_service")


def _provenance(config: RunConfig) -> Dict[str, Any]:
    inputs: Dict[str, Any] = {}
    for section in ("run", "apparatus", "collection", "laser", "uncertainty"):
        block = getattr(config, section)
        if block is not None:
            inputs.update({f"{section}.{k}": v for k, v in block.model_dump().items()})
    for name, sample in config.samples.items():
        inputs.update(
            {f"sample.{name}.{k}": v for k, v in sample.model_dump().items() if v not in (None, [])}
        )
    return inputs


class BoundsService:
    """Evaluates every configured sample concurrently and reports in file order."""

    def __init__(self, config_repo: Optional[ConfigRepository] = None):
        self.config_repo = config_repo or ConfigRepository()

    def _bound_one(
        self,
        name: str,
        section: SampleSection,
        app: ApparatusSpec,
        laser: Optional[BeamProfile],
        phi_spdc_max: float,
        entanglement: EntanglementParams,
        budget: UncertaintyBudget,
    ) -> Dict[str, Any]:
        sample = self.config_repo.sample_spec(name, section)
        bound = bound_sample(sample, app, laser, phi_spdc_max, entanglement, budget)
        diagonals = e2pef_diagonals(sample, app)
        return {"bound": bound, "diagonals": diagonals}

    async def bounds(self, emitter: ReportEmitter, config: RunConfig) -> Dict[str, Any]:
        """
        sigma_E upper bound, estimate, QA^UB and E2PEF diagonals for every sample.

        A failing sample is logged and reported as a note; the others continue.

        Returns:
            Dict with ``bounds`` (name -> E2PABound) and ``failures`` (name -> message)
        """
        try:
            app = config.apparatus_spec()
            laser = config.laser.to_beam() if config.laser else None
            entanglement = config.run.entanglement()
            budget = config.budget()
            phi_spdc_max = peak_flux(app.spdc_beam())

            emitter.provenance(_provenance(config))
            tasks = [
                asyncio.to_thread(
                    self._bound_one, name, section, app, laser, phi_spdc_max, entanglement, budget
                )
                for name, section in config.samples.items()
            ]
            outcomes = await asyncio.gather(*tasks, return_exceptions=True)
        except Exception as e:
            logger.error("bounds_service.bounds.error", error=str(e))
            raise

        bounds: Dict[str, E2PABound] = {}
        failures: Dict[str, str] = {}
        records: List[Dict[str, Any]] = []
        diagonal_rows: List[Dict[str, Any]] = []
        for name, outcome in zip(config.samples, outcomes):
            if isinstance(outcome, BaseException):
                logger.warning("bounds_service.sample_failed", sample=name, error=str(outcome))
                failures[name] = f"{type(outcome).__name__}: {outcome}"
                records.append({"sample": name, "notes": failures[name]})
                continue
            bound: E2PABound = outcome["bound"]
            bounds[name] = bound
            records.append(_record(bound))
            diagonal_rows.extend(
                {"sample": name, **point.model_dump()} for point in outcome["diagonals"]
            )

        emitter.section("phi_spdc_max")
        emitter.values({"peak_flux": phi_spdc_max})
        emitter.line()
        if records:
            emitter.table("bounds", pd.DataFrame(records))
        else:
            emitter.line("no samples configured")
        for name, message in failures.items():
            emitter.line(f"note: {name}: {message}")
        for name, bound in bounds.items():
            for note in bound.notes:
                emitter.line(f"note: {name}: {note}")
        if diagonal_rows:
            emitter.records("e2pef_diagonals", diagonal_rows)

        logger.info("bounds_service.bounds.complete", samples=len(bounds), failures=len(failures))
        return {"bounds": bounds, "failures": failures, "phi_spdc_max": phi_spdc_max}

    async def sigma_c(
        self,
        emitter: ReportEmitter,
        config: RunConfig,
        sample_name: str,
        slope: float,
        slope_u: float = 0.0,
        exponent: Optional[float] = None,
    ) -> Dict[str, Any]:
        """sigma_C from a C2PEF slope, with the sigma_E estimate it implies."""
        try:
            if sample_name not in config.samples:
                raise ConfigError([f"[sample.{sample_name}]: not in configuration"])
            if config.laser is None:
                raise ConfigError(["[laser]: missing"])
            sample = await asyncio.to_thread(
                self.config_repo.sample_spec, sample_name, config.samples[sample_name]
            )
            app = config.apparatus_spec()
            budget = config.budget()
            result = await asyncio.to_thread(
                extract_sigma_c,
                UncertainValue(value=slope, std_uncertainty=slope_u, coverage_k=budget.coverage_k),
                sample,
                app,
                config.laser.to_beam(),
                budget,
                exponent,
            )
            entanglement = config.run.entanglement()
            estimate = sigma_e_estimate(
                result.sigma_c.value, entanglement.te_fs, entanglement.ae_cm2
            )

            emitter.provenance(
                {
                    **_provenance(config),
                    "sigma_c.sample": sample_name,
                    "sigma_c.slope": slope,
                    "sigma_c.slope_u": slope_u,
                    "sigma_c.exponent": exponent if exponent is not None else "-",
                }
            )
            emitter.section("sigma_c")
            emitter.values(
                {
                    "sample": sample_name,
                    "sigma_c_gm": result.sigma_c.value,
                    "sigma_c_expanded_gm": result.sigma_c.expanded,
                    "accepted": result.accepted,
                    "sigma_e_estimate_cm2": estimate,
                    "expected_e2pef_at_estimate_cps": expected_e2pef(estimate, sample, app)
                    if app.photon_rate
                    else "-",
                }
            )
            logger.info(
                "bounds_service.sigma_c.complete", sample=sample_name, sigma_c=result.sigma_c.value
            )
            return {"result": result, "sigma_e_estimate": estimate}
        except Exception as e:
            logger.error("bounds_service.sigma_c.error", sample=sample_name, error=str(e))
            raise


def _record(bound: E2PABound) -> Dict[str, Any]:
    record: Dict[str, Any] = {
        "sample": bound.sample_name,
        "sigma_e_ub_cm2": bound.sigma_e_ub.value,
        "sigma_e_ub_expanded": bound.sigma_e_ub.expanded,
        "sigma_e_est_cm2": bound.sigma_e_est,
        "qa_ub": bound.qa_ub.value if bound.qa_ub else None,
        "qa_ub_expanded": bound.qa_ub.expanded if bound.qa_ub else None,
        "phi_min_classical": bound.phi_min_classical,
    }
    if bound.sigma_e_est_bracket:
        record["sigma_e_est_low"], record["sigma_e_est_high"] = bound.sigma_e_est_bracket
    record["notes"] = "; ".join(bound.notes)
    return record
