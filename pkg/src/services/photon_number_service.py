"""Mean photon number per pulse from detector count rates."""

import asyncio
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
import structlog

from ..models.photon import MuChainResult
from ..repositories.report_repository import ReportEmitter
from ..tools.photon_stats import extrapolate_mu, fit_mu_line, mu_at_sample, mu_chain
from ..utils.exceptions import DomainError

logger = structlog.get_logger("photon_number_service")


class PhotonNumberService:
    """Runs the count-rate to mu chain, optionally over a pump-power scan."""

    async def mu(
        self,
        emitter: ReportEmitter,
        eta: float,
        dead_time_ns: float,
        rep_rate_hz: float,
        modes: int = 1,
        count_rate: Optional[float] = None,
        scan: Optional[Sequence[Tuple[float, float]]] = None,
        target_power: Optional[float] = None,
        path_loss: Optional[float] = None,
    ) -> Dict[str, Any]:
        """
        Mean photons per pulse for one count rate or a (power, rate) scan.

        Args:
            emitter: Report sink
            eta: System detection efficiency
            dead_time_ns: Detector dead time
            rep_rate_hz: Pulse repetition rate
            modes: Number of equally populated modes
            count_rate: Single measured count rate
            scan: (pump power, count rate) pairs; mu is extrapolated to
                ``target_power`` along their line
            target_power: Pump power to extrapolate to
            path_loss: Fractional loss between crystal and sample

        Returns:
            Dict with the chain records and the final mu
        """
        try:
            if count_rate is None and not scan:
                raise DomainError("give a count rate or a power scan")
            emitter.provenance(
                {
                    "eta": eta,
                    "dead_time_ns": dead_time_ns,
                    "rep_rate_hz": rep_rate_hz,
                    "modes": modes,
                    "count_rate": count_rate if count_rate is not None else "-",
                    "scan": [f"{p:g}:{r:g}" for p, r in scan] if scan else "-",
                    "target_power": target_power if target_power is not None else "-",
                    "path_loss": path_loss if path_loss is not None else "-",
                }
            )

            chains: List[MuChainResult] = []
            rates = [count_rate] if count_rate is not None else [rate for _, rate in scan or []]
            for rate in rates:
                chains.append(
                    await asyncio.to_thread(mu_chain, rate, eta, dead_time_ns, rep_rate_hz, modes)
                )

            frame = pd.DataFrame([chain.model_dump() for chain in chains])
            if scan:
                frame.insert(0, "power", [p for p, _ in scan])
            emitter.table("mu_chain", frame)

            result: Dict[str, Any] = {"chains": chains, "mu": chains[-1].mu}
            if scan:
                points = [(power, chain.mu) for (power, _), chain in zip(scan, chains)]
                slope, intercept = fit_mu_line(points)
                result.update(slope=slope, intercept=intercept)
                if target_power is not None:
                    result["mu"] = extrapolate_mu(points, target_power)
                emitter.values({"mu_per_power": slope, "mu_intercept": intercept})
            if path_loss is not None:
                result["mu_at_sample"] = mu_at_sample(result["mu"], path_loss)

            emitter.section("result")
            emitter.values(
                {key: result[key] for key in ("mu", "mu_at_sample") if key in result}
            )
            logger.info("photon_number_service.mu.complete", mu=result["mu"], points=len(chains))
            return result
        except Exception as e:
            logger.error("photon_number_service.mu.error", error=str(e))
            raise
