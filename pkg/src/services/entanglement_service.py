"""Entanglement-time analysis of a measured or synthetic JSI."""

import asyncio
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import numpy as np
import pandas as pd
import structlog

from ..models.spectral import DispersionSpec, GridUnit, JointSpectrum
from ..repositories.jsi_repository import JsiRepository
from ..repositories.report_repository import ReportEmitter
from ..tools.jsi import (
    DEFAULT_PADDING,
    DEFAULT_PUMP_FWHM_FS,
    antidiagonal_projection,
    apply_dispersion_and_transform,
    coincidence_ratio,
    entanglement_time,
    fwhm_of_profile,
    grid_points_for_window,
    marginal_pulse_fwhm,
    resample_to_frequency,
    synthesize_gaussian_jsi,
    time_window_fs,
)

logger = structlog.get_logger("entanglement_service")


class EntanglementService:
    """Computes T_e, marginal pulse widths and the coincidence-ratio curve."""

    # synthetic stand-in for the measured pair spectrum
    SYNTHETIC_JSI = {
        "center_nm": 810.0,
        "fwhm_s_nm": 76.0,
        "fwhm_i_nm": 76.0,
        "anticorrelation": 1.0,
        "pump_fwhm_fs": DEFAULT_PUMP_FWHM_FS,
    }
    # coincidence windows as multiples of the time step
    WINDOW_STEPS = (1, 2, 5, 10, 20, 50, 100, 200, 500)

    def __init__(self, jsi_repo: Optional[JsiRepository] = None):
        self.jsi_repo = jsi_repo or JsiRepository()

    def load_or_synthesize(
        self, jsi_path: Optional[Path], n_points: Optional[int] = None, gdd_fs2: float = 0.0
    ) -> JointSpectrum:
        """
        Load and resample a JSI, or synthesize the stand-in one.

        Without ``n_points`` the frequency step is chosen so that the time
        window holds the JTI dispersed by ``gdd_fs2``.
        """
        if jsi_path is None:
            params = dict(self.SYNTHETIC_JSI, gdd_fs2=gdd_fs2)
            if n_points:
                params["n_points"] = n_points
            return synthesize_gaussian_jsi(**params)
        jsi = self.jsi_repo.load_jsi(jsi_path)
        if jsi.unit == GridUnit.NANOMETER:
            resampled = resample_to_frequency(jsi, n_points)
            if n_points is None and gdd_fs2:
                width = max(
                    fwhm_of_profile(resampled.grid_s, resampled.intensity.sum(axis=1)),
                    fwhm_of_profile(resampled.grid_i, resampled.intensity.sum(axis=0)),
                )
                span = max(np.ptp(resampled.grid_s), np.ptp(resampled.grid_i))
                needed = grid_points_for_window(span, time_window_fs(width, gdd_fs2))
                if needed > resampled.intensity.shape[0]:
                    logger.info("entanglement_service.regrid", n_points=needed)
                    resampled = resample_to_frequency(jsi, needed)
            jsi = resampled
        return jsi

    def compute(
        self,
        jsi: JointSpectrum,
        gdd_fs2: float,
        padding: int = DEFAULT_PADDING,
        windows_fs: Optional[Sequence[float]] = None,
    ) -> Dict[str, Any]:
        """
        Transform-limited and dispersed temporal analysis of one JSI.

        Returns:
            Dict with te_fs, te_tl_fs, marginal widths, the coincidence-ratio
            curve (empty when gdd is zero) and both JTIs
        """
        reference = apply_dispersion_and_transform(jsi, DispersionSpec(), padding)
        result: Dict[str, Any] = {
            "gdd_fs2": gdd_fs2,
            "dt_fs": reference.dt_fs,
            "te_tl_fs": entanglement_time(reference),
            "jti_reference": reference,
            "ratio_curve": [],
        }
        if gdd_fs2 == 0:
            result.update(
                te_fs=result["te_tl_fs"],
                marginal_s_fs=marginal_pulse_fwhm(reference, "s"),
                marginal_i_fs=marginal_pulse_fwhm(reference, "i"),
                jti=reference,
                transform_limited=True,
            )
            return result

        dispersed = apply_dispersion_and_transform(jsi, DispersionSpec(gdd_fs2=gdd_fs2), padding)
        if windows_fs is None:
            delays, _ = antidiagonal_projection(reference)
            span = float(np.max(np.abs(delays)))
            windows_fs = [step * reference.dt_fs for step in self.WINDOW_STEPS]
            windows_fs = [w for w in windows_fs if w < span] + [span]
        result.update(
            te_fs=entanglement_time(dispersed),
            marginal_s_fs=marginal_pulse_fwhm(dispersed, "s"),
            marginal_i_fs=marginal_pulse_fwhm(dispersed, "i"),
            jti=dispersed,
            transform_limited=False,
            ratio_curve=[(w, coincidence_ratio(reference, dispersed, w)) for w in windows_fs],
        )
        return result

    async def analyze(
        self,
        emitter: ReportEmitter,
        jsi_path: Optional[Path],
        gdd_fs2: float,
        n_points: Optional[int] = None,
        padding: int = DEFAULT_PADDING,
    ) -> Dict[str, Any]:
        """
        Run the entanglement-time analysis and report it.

        Args:
            emitter: Report sink
            jsi_path: JSI grid file; the synthetic JSI is used when None
            gdd_fs2: Quadratic phase per photon
            n_points: Frequency grid points per axis
            padding: Zero-padding factor of the DFT

        Returns:
            The result dict of ``compute`` plus the path of the written JTI file
        """
        try:
            jsi = await asyncio.to_thread(self.load_or_synthesize, jsi_path, n_points, gdd_fs2)
            result = await asyncio.to_thread(self.compute, jsi, gdd_fs2, padding)

            emitter.provenance(
                {
                    "jsi": jsi_path if jsi_path is not None else "synthetic",
                    **({} if jsi_path is not None else self.SYNTHETIC_JSI),
                    "gdd_fs2": gdd_fs2,
                    "grid_points": jsi.intensity.shape[0],
                    "padding": padding,
                }
            )
            emitter.section("entanglement")
            emitter.values(
                {
                    "te_fs": result["te_fs"],
                    "te_transform_limited_fs": result["te_tl_fs"],
                    "marginal_s_fs": result["marginal_s_fs"],
                    "marginal_i_fs": result["marginal_i_fs"],
                    "time_step_fs": result["dt_fs"],
                }
            )
            emitter.line()
            if result["ratio_curve"]:
                emitter.table(
                    "coincidence_ratio",
                    pd.DataFrame(result["ratio_curve"], columns=["window_fs", "ratio"]),
                )
            else:
                emitter.line("transform-limited: coincidence ratio is 1 for every window")
            if emitter.out_dir is not None:
                path = self.jsi_repo.save_jti(result["jti"], emitter.out_dir / "jti.csv")
                emitter.note_file(path)
                result["jti_path"] = path

            logger.info(
                "entanglement_service.analyze.complete",
                te_fs=result["te_fs"],
                gdd_fs2=gdd_fs2,
            )
            return result
        except Exception as e:
            logger.error("entanglement_service.analyze.error", error=str(e))
            raise
