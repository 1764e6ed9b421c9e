"""
Command-line entry point.

Each verb loads its inputs, runs one service and writes a text report (also
echoed to stdout) plus CSV records into the output directory.
"""

import argparse
import asyncio
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Awaitable, Callable, Dict, List, Optional, Sequence, TextIO, Tuple

import structlog
from dotenv import load_dotenv

from .observability.monitoring import ObservabilityManager
from .repositories.config_repository import ConfigRepository
from .repositories.report_repository import ReportEmitter
from .services.acquisition_service import AcquisitionService
from .services.beam_service import BeamService
from .services.bounds_service import BoundsService
from .services.entanglement_service import EntanglementService
from .services.photon_number_service import PhotonNumberService
from .tools.jsi import DEFAULT_PADDING
from .utils.exceptions import EXIT_OK, exit_code_for

load_dotenv()

logger = structlog.get_logger("main")


def _scan_point(text: str) -> Tuple[float, float]:
    try:
        power, rate = text.split(":")
        return float(power), float(rate)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected POWER:RATE, got {text!r}")


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--out",
        type=Path,
        default=None,
        help="Output directory (default: $E2PA_OUTPUT_DIR or ./out)",
    )
    common.add_argument("--log-level", default=None, help="Log level (default: $LOG_LEVEL or INFO)")
    common.add_argument("--log-format", choices=("console", "json"), default=None)

    parser = argparse.ArgumentParser(
        prog="e2pa", description="Sensitivity bounds for entangled two-photon absorption"
    )
    verbs = parser.add_subparsers(dest="command", required=True)

    te = verbs.add_parser("te", parents=[common], help="Entanglement time from a JSI")
    te.add_argument("--jsi", type=Path, default=None, help="JSI grid file (default: synthetic)")
    te.add_argument("--gdd-fs2", type=float, default=3700.0, help="Quadratic phase per photon")
    te.add_argument("--points", type=int, default=None, help="Frequency grid points per axis")
    te.add_argument("--padding", type=int, default=DEFAULT_PADDING)

    mu = verbs.add_parser("mu", parents=[common], help="Photons per pulse from count rates")
    rates = mu.add_mutually_exclusive_group(required=True)
    rates.add_argument("--count-rate", type=float, help="Measured singles rate, counts/s")
    rates.add_argument(
        "--scan", type=_scan_point, nargs="+", metavar="POWER:RATE", help="Pump-power scan"
    )
    mu.add_argument("--eta", type=float, required=True, help="System detection efficiency")
    mu.add_argument("--dead-time-ns", type=float, required=True)
    mu.add_argument("--rep-rate-hz", type=float, required=True)
    mu.add_argument("--modes", type=int, default=1)
    mu.add_argument("--target-power", type=float, default=None)
    mu.add_argument("--path-loss", type=float, default=None)

    flux = verbs.add_parser("flux", parents=[common], help="Peak photon fluxes")
    flux.add_argument("config", type=Path)
    flux.add_argument("--mu", type=float, default=None, help="Photons per pulse (default: Q/g)")
    flux.add_argument("--target-flux", type=float, default=None)

    bounds = verbs.add_parser("bounds", parents=[common], help="Per-sample E2PA bounds")
    bounds.add_argument("config", type=Path)

    sigma_c = verbs.add_parser("sigma-c", parents=[common], help="sigma_C from a C2PEF slope")
    sigma_c.add_argument("config", type=Path)
    sigma_c.add_argument("--sample", required=True)
    sigma_c.add_argument("--slope", type=float, required=True, help="counts/s per uW^2")
    sigma_c.add_argument("--slope-u", type=float, default=0.0, help="Standard uncertainty")
    sigma_c.add_argument("--exponent", type=float, default=None, help="Fitted power-law exponent")

    simulate = verbs.add_parser("simulate", parents=[common], help="Synthetic count series")
    simulate.add_argument("config", type=Path, help="Configuration with a [sim] section")

    fit = verbs.add_parser("fit", parents=[common], help="Fit recorded count series")
    fit.add_argument("series", help="Glob pattern of count-series files")
    fit.add_argument("--config", type=Path, default=None)
    fit.add_argument("--sample", default=None)

    allan = verbs.add_parser("allan", parents=[common], help="Allan deviation of a rate record")
    allan.add_argument("rates", type=Path)
    allan.add_argument("--taus", type=_float_list, default=None, help="Comma-separated taus, s")
    return parser


class AnalysisExecutor:
    """
    Runs one CLI command: logging, configuration, the service call and the report.
    """

    def __init__(
        self,
        log_level: Optional[str] = None,
        log_format: Optional[str] = None,
        log_dir: Optional[str] = None,
        stream: Optional[TextIO] = None,
    ):
        self.observability = ObservabilityManager(
            log_level=log_level or os.getenv("LOG_LEVEL", "INFO"),
            log_format=log_format or os.getenv("LOG_FORMAT", "console"),
            log_dir=log_dir if log_dir is not None else os.getenv("LOG_DIR", "logs"),
        )
        self.stream = stream
        self.config_repo = ConfigRepository()

    def _handlers(self) -> Dict[str, Callable[[ReportEmitter, argparse.Namespace], Awaitable]]:
        return {
            "te": self._te,
            "mu": self._mu,
            "flux": self._flux,
            "bounds": self._bounds,
            "sigma-c": self._sigma_c,
            "simulate": self._simulate,
            "fit": self._fit,
            "allan": self._allan,
        }

    async def _te(self, emitter: ReportEmitter, args: argparse.Namespace) -> Dict[str, Any]:
        return await EntanglementService().analyze(
            emitter, args.jsi, args.gdd_fs2, args.points, args.padding
        )

    async def _mu(self, emitter: ReportEmitter, args: argparse.Namespace) -> Dict[str, Any]:
        return await PhotonNumberService().mu(
            emitter,
            eta=args.eta,
            dead_time_ns=args.dead_time_ns,
            rep_rate_hz=args.rep_rate_hz,
            modes=args.modes,
            count_rate=args.count_rate,
            scan=args.scan,
            target_power=args.target_power,
            path_loss=args.path_loss,
        )

    async def _flux(self, emitter: ReportEmitter, args: argparse.Namespace) -> Dict[str, Any]:
        config = self.config_repo.load(args.config)
        return BeamService().flux(emitter, config, mu=args.mu, target_flux=args.target_flux)

    async def _bounds(self, emitter: ReportEmitter, args: argparse.Namespace) -> Dict[str, Any]:
        config = self.config_repo.load(args.config)
        return await BoundsService(self.config_repo).bounds(emitter, config)

    async def _sigma_c(self, emitter: ReportEmitter, args: argparse.Namespace) -> Dict[str, Any]:
        config = self.config_repo.load(args.config)
        return await BoundsService(self.config_repo).sigma_c(
            emitter, config, args.sample, args.slope, args.slope_u, args.exponent
        )

    async def _simulate(self, emitter: ReportEmitter, args: argparse.Namespace) -> Dict[str, Any]:
        config = self.config_repo.load(args.config)
        return await AcquisitionService(self.config_repo).simulate(emitter, config)

    async def _fit(self, emitter: ReportEmitter, args: argparse.Namespace) -> Dict[str, Any]:
        config = self.config_repo.load(args.config) if args.config else None
        return await AcquisitionService(self.config_repo).fit(
            emitter, args.series, config, args.sample
        )

    async def _allan(self, emitter: ReportEmitter, args: argparse.Namespace) -> Dict[str, Any]:
        return await AcquisitionService().allan(emitter, args.rates, args.taus)

    async def execute(self, args: argparse.Namespace) -> Dict[str, Any]:
        """
        Execute one parsed command.

        Args:
            args: Namespace from ``build_parser``

        Returns:
            dict: success flag, exit code, the service result or the error, and the report path
        """
        command = args.command
        out_dir = args.out if args.out is not None else Path(os.getenv("E2PA_OUTPUT_DIR", "out"))
        emitter = ReportEmitter(command, out_dir, stream=self.stream)
        start_time = datetime.now()
        self.observability.log_command_start(command, out_dir=str(out_dir))

        try:
            result = await self._handlers()[command](emitter, args)
            report_path = emitter.close()
            duration = (datetime.now() - start_time).total_seconds()
            self.observability.log_command_complete(command, duration, files=len(emitter.written))
            return {
                "success": True,
                "command": command,
                "exit_code": EXIT_OK,
                "result": result,
                "report_path": report_path,
                "duration": duration,
            }
        except Exception as e:
            self.observability.log_command_error(
                command, error=str(e), error_type=type(e).__name__
            )
            return {
                "success": False,
                "command": command,
                "exit_code": exit_code_for(e),
                "error": f"{type(e).__name__}: {e}",
            }


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the application."""
    args = build_parser().parse_args(argv)
    executor = AnalysisExecutor(
        log_level=args.log_level, log_format=args.log_format, stream=sys.stdout
    )
    outcome = asyncio.run(executor.execute(args))
    if not outcome["success"]:
        print(f"e2pa {args.command}: {outcome['error']}", file=sys.stderr)
    elif outcome["report_path"] is not None:
        print(f"report: {outcome['report_path']}", file=sys.stderr)
    return int(outcome["exit_code"])


if __name__ == "__main__":
    sys.exit(main())
