"""Run configuration files.

INI layout with unit-suffixed keys::

    [apparatus]
    rep_rate_hz = 8e7
    ...
    [sample.AF455]
    concentration_umol_per_l = 1100

All problems (unknown sections or keys, missing or invalid values) are
collected and raised together as one ConfigError.
"""

import configparser
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import structlog
from pydantic import ValidationError

from ..models.config import RunConfig, SampleSection
from ..models.sample import SampleSpec, SpectrumKind
from ..tools.spectral_overlap import spectral_overlap_ratio
from ..utils.exceptions import ConfigError, DataFormatError
from .spectrum_repository import SpectrumRepository

logger = structlog.get_logger("config_repository")

PathLike = Union[str, Path]
PLAIN_SECTIONS = ("run", "apparatus", "collection", "laser", "uncertainty", "sim")
SAMPLE_PREFIX = "sample."


def _location(loc: tuple) -> str:
    parts = [str(part) for part in loc]
    if len(parts) >= 2 and parts[0] == "samples":
        section, rest = f"{SAMPLE_PREFIX}{parts[1]}", parts[2:]
    elif parts:
        section, rest = parts[0], parts[1:]
    else:
        return "[config]"
    return f"[{section}]" + (f" {'.'.join(rest)}" if rest else "")


def _problems(error: ValidationError) -> List[str]:
    problems = []
    for detail in error.errors():
        message = detail["msg"]
        if detail["type"] == "extra_forbidden":
            message = "unknown key"
        elif detail["type"] == "missing":
            message = "missing"
        problems.append(f"{_location(detail['loc'])}: {message}")
    return problems


class ConfigRepository:
    """Parses and validates run configuration files."""

    def __init__(self, spectra: Optional[SpectrumRepository] = None):
        self.spectra = spectra

    def parse(self, text: str, source: str = "<config>") -> RunConfig:
        """
        Validate configuration text.

        Args:
            text: INI text
            source: Name used in error messages

        Returns:
            RunConfig

        Raises:
            ConfigError: Listing every problem found
            DataFormatError: If the text is not valid INI
        """
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
        try:
            parser.read_string(text, source=source)
        except configparser.ParsingError as e:
            line = e.errors[0][0] if e.errors else None
            raise DataFormatError("malformed line", source, line) from e
        except configparser.Error as e:
            raise DataFormatError(str(e).splitlines()[0], source, getattr(e, "lineno", None)) from e

        data: Dict[str, Any] = {"samples": {}}
        problems: List[str] = []
        for section in parser.sections():
            values = dict(parser.items(section))
            if section.startswith(SAMPLE_PREFIX):
                name = section[len(SAMPLE_PREFIX) :].strip()
                if not name:
                    problems.append(f"[{section}]: sample name is empty")
                data["samples"][name] = values
            elif section in PLAIN_SECTIONS:
                data[section] = values
            else:
                problems.append(f"[{section}]: unknown section")

        try:
            config = RunConfig.model_validate(data)
        except ValidationError as e:
            problems.extend(_problems(e))
            config = None
        if problems or config is None:
            logger.error("config_repository.parse.error", source=source, problems=len(problems))
            raise ConfigError(problems)
        logger.info("config_repository.parsed", source=source, samples=len(config.samples))
        return config

    def load(self, path: PathLike) -> RunConfig:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            logger.error("config_repository.load.error", path=str(path), error=str(e))
            raise
        if self.spectra is None:
            self.spectra = SpectrumRepository(path.parent)
        return self.parse(text, source=str(path))

    def sample_specs(self, config: RunConfig) -> Dict[str, SampleSpec]:
        """
        Sample specs in file order, computing overlap ratios from spectra when needed.

        Raises:
            ConfigError: If a sample spec is invalid
        """
        specs: Dict[str, SampleSpec] = {}
        problems: List[str] = []
        for name, section in config.samples.items():
            try:
                specs[name] = self.sample_spec(name, section)
            except ValidationError as e:
                problems.extend(
                    f"[{SAMPLE_PREFIX}{name}] {'.'.join(str(p) for p in d['loc'])}: {d['msg']}"
                    for d in e.errors()
                )
        if problems:
            raise ConfigError(problems)
        return specs

    def sample_spec(self, name: str, section: SampleSection) -> SampleSpec:
        """One sample spec; the overlap ratio comes from spectra when not given."""
        ratio = section.overlap_ratio
        if ratio is None:
            ratio = self._overlap_ratio(section)
        return section.to_spec(name, ratio)

    def _overlap_ratio(self, section: SampleSection) -> float:
        spectra = self.spectra or SpectrumRepository()
        assert section.emission_csv and section.qe_csv and section.mirror_csv
        return spectral_overlap_ratio(
            spectra.load(section.emission_csv, SpectrumKind.EMISSION),
            spectra.load_many(section.chain_csvs, SpectrumKind.TRANSMITTANCE),
            spectra.load(section.qe_csv, SpectrumKind.QUANTUM_EFFICIENCY),
            spectra.load(section.mirror_csv, SpectrumKind.REFLECTANCE),
            quantum_yield=section.quantum_yield,
            cuvette=(
                spectra.load(section.cuvette_csv, SpectrumKind.TRANSMITTANCE)
                if section.cuvette_csv
                else None
            ),
        )
