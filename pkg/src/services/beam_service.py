"""Peak-flux bookkeeping for the entangled and laser beams."""

from typing import Any, Dict, Optional

import structlog

from ..models.config import RunConfig
from ..repositories.report_repository import ReportEmitter
from ..tools.optics import (
    collection_line_average,
    flux_form_discrepancy,
    flux_per_photon,
    mean_photons_per_pulse,
    peak_flux,
    peak_flux_from_mu,
    peak_flux_uncertainty,
    power_for_peak_flux,
)

logger = structlog.get_logger("beam_service")


class BeamService:
    """Reports fluxes, the laser/SPDC conversion ratio and collection averages."""

    def flux(
        self,
        emitter: ReportEmitter,
        config: RunConfig,
        mu: Optional[float] = None,
        target_flux: Optional[float] = None,
    ) -> Dict[str, Any]:
        """
        Peak fluxes for the configured beams.

        Args:
            emitter: Report sink
            config: Run configuration with the apparatus and, optionally, the laser
            mu: Photons per pulse to evaluate on the entangled beam; defaults to Q/g
            target_flux: Peak flux for which to report the required laser power

        Returns:
            Dict of the reported quantities
        """
        try:
            app = config.apparatus_spec()
            spdc = app.spdc_beam()
            budget = config.budget()
            mu_spdc = mu if mu is not None else mean_photons_per_pulse(spdc)
            result: Dict[str, Any] = {
                "spdc_mu": mu_spdc,
                "spdc_flux_per_photon": flux_per_photon(spdc),
                "spdc_peak_flux": peak_flux_from_mu(spdc, mu_spdc),
                "spdc_peak_flux_at_q": peak_flux(spdc),
                "mode_form_ratio": flux_form_discrepancy(spdc),
                "kappa_min_cuvette": collection_line_average(
                    app.collection, app.cuvette_length_cm * 10.0 / 2.0
                ),
            }
            flux_u = peak_flux_uncertainty(
                spdc,
                mu_spdc,
                budget.photon_rate,
                budget.beam_width,
                budget.beam_width,
                budget.pulse_duration,
                coverage_k=budget.coverage_k,
            )
            result["spdc_peak_flux_expanded_u"] = flux_u.expanded

            if config.laser is not None:
                laser = config.laser.to_beam()
                result["laser_flux_per_photon"] = flux_per_photon(laser)
                result["laser_peak_flux"] = peak_flux(laser)
                result["laser_to_spdc_ratio"] = (
                    result["laser_flux_per_photon"] / result["spdc_flux_per_photon"]
                )
                if target_flux is not None:
                    result["laser_power_uw_for_target"] = power_for_peak_flux(laser, target_flux)

            emitter.provenance(
                {
                    **{f"apparatus.{k}": v for k, v in config.apparatus.model_dump().items()},
                    **{f"collection.{k}": v for k, v in config.collection.model_dump().items()},
                    **(
                        {f"laser.{k}": v for k, v in config.laser.model_dump().items()}
                        if config.laser
                        else {}
                    ),
                    "mu": mu if mu is not None else "Q/g",
                    "target_flux": target_flux if target_flux is not None else "-",
                }
            )
            emitter.section("flux")
            emitter.values(result)
            logger.info("beam_service.flux.complete", spdc_peak_flux=result["spdc_peak_flux"])
            return result
        except Exception as e:
            logger.error("beam_service.flux.error", error=str(e))
            raise
