"""Spectrum files: two columns, wavelength in nm and value."""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import pandas as pd
import structlog
from pydantic import ValidationError

from ..models.sample import Spectrum, SpectrumKind
from ..utils.exceptions import DataFormatError
from .tabular import read_text_table, write_with_comments

logger = structlog.get_logger("spectrum_repository")

PathLike = Union[str, Path]


class SpectrumRepository:
    """Loads and stores spectral curves, caching by resolved path."""

    def __init__(self, base_dir: Optional[PathLike] = None):
        self.base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
        self._cache: Dict[Path, Spectrum] = {}

    def resolve(self, path: PathLike) -> Path:
        candidate = Path(path)
        return candidate if candidate.is_absolute() else self.base_dir / candidate

    def load(self, path: PathLike, kind: SpectrumKind) -> Spectrum:
        """
        Load a spectrum file.

        Args:
            path: CSV file, absolute or relative to the base directory
            kind: What the curve represents

        Returns:
            Spectrum named after the file stem

        Raises:
            DataFormatError: On malformed rows or an invalid curve
        """
        resolved = self.resolve(path)
        if resolved in self._cache and self._cache[resolved].kind == kind:
            return self._cache[resolved]
        try:
            table = read_text_table(resolved)
            if table.frame.shape[1] != 2:
                raise DataFormatError(
                    f"expected 2 columns, found {table.frame.shape[1]}", str(resolved)
                )
            values = table.numeric()
            spectrum = Spectrum(
                wavelength_nm=values[:, 0],
                intensity=values[:, 1],
                kind=kind,
                name=resolved.stem,
            )
        except ValidationError as e:
            logger.error("spectrum_repository.load.error", path=str(resolved), error=str(e))
            raise DataFormatError(_first_message(e), str(resolved)) from e
        except Exception as e:
            logger.error("spectrum_repository.load.error", path=str(resolved), error=str(e))
            raise
        self._cache[resolved] = spectrum
        logger.debug(
            "spectrum_repository.loaded", path=str(resolved), points=spectrum.intensity.size
        )
        return spectrum

    def load_many(self, paths: Sequence[PathLike], kind: SpectrumKind) -> List[Spectrum]:
        return [self.load(path, kind) for path in paths]

    def save(self, spectrum: Spectrum, path: PathLike) -> Path:
        frame = pd.DataFrame(
            {"wavelength_nm": spectrum.wavelength_nm, "value": spectrum.intensity}
        )
        return write_with_comments(self.resolve(path), frame, {"kind": spectrum.kind.value})


def _first_message(error: ValidationError) -> str:
    details = error.errors()
    return str(details[0]["msg"]) if details else str(error)
