"""Joint spectral and joint temporal grid files.

Layout: the first data row holds a corner cell (ignored) followed by the
idler (or t_i) axis; every further row holds one signal (or t_s) value
followed by the intensities of that row. Separators may be commas or
whitespace. ``# unit=nm`` or ``# unit=rad/fs`` selects the JSI axis unit.
"""

from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
import structlog
from pydantic import ValidationError

from ..models.spectral import GridUnit, JointSpectrum, JointTemporal
from ..utils.exceptions import DataFormatError
from ..utils.units import wavelength_to_angular_frequency
from .tabular import WHITESPACE_OR_COMMA, TextTable, read_text_table, write_with_comments

logger = structlog.get_logger("jsi_repository")

PathLike = Union[str, Path]


def _grid(table: TextTable) -> tuple:
    if table.frame.shape[0] < 3 or table.frame.shape[1] < 3:
        raise DataFormatError(
            "grid needs at least two rows and two columns of data", str(table.path)
        )
    columns = range(1, table.frame.shape[1])
    axis_i = table.numeric(columns)[0]
    body = table.numeric(first_row=1)
    axis_s = body[:, 0]
    for name, axis, line in (("column", axis_i, table.line_of(0)), ("row", axis_s, None)):
        steps = np.diff(axis)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise DataFormatError(f"{name} axis must be strictly monotonic", str(table.path), line)
    return axis_s, axis_i, body[:, 1:]


class JsiRepository:
    """Reads JSI grids and writes JTI grids."""

    def load_jsi(self, path: PathLike) -> JointSpectrum:
        """
        Load a JSI grid file.

        Args:
            path: Grid file

        Returns:
            JointSpectrum normalized to unit mass

        Raises:
            DataFormatError: With the offending line number for malformed rows
        """
        path = Path(path)
        try:
            table = read_text_table(path, sep=WHITESPACE_OR_COMMA, allow_header=False)
            unit = GridUnit(table.meta.get("unit", GridUnit.NANOMETER.value))
            grid_s, grid_i, intensity = _grid(table)
            if np.any(intensity < 0):
                row = int(np.nonzero(np.any(intensity < 0, axis=1))[0][0])
                raise DataFormatError("negative intensity", str(path), table.line_of(row + 1))
            total = intensity.sum()
            if not total > 0:
                raise DataFormatError("JSI has no positive intensity", str(path))
            if "pump_center_rad_per_fs" in table.meta:
                center = float(table.meta["pump_center_rad_per_fs"])
            elif unit == GridUnit.RAD_PER_FS:
                center = float(np.sum(intensity * np.add.outer(grid_s, grid_i)) / (2.0 * total))
            else:
                weighted = np.sum(intensity * np.add.outer(1 / grid_s, 1 / grid_i)) / (2.0 * total)
                center = wavelength_to_angular_frequency(1.0 / weighted)
            jsi = JointSpectrum(
                grid_s=grid_s,
                grid_i=grid_i,
                intensity=intensity / total,
                unit=unit,
                pump_center=center,
            )
        except ValidationError as e:
            logger.error("jsi_repository.load_jsi.error", path=str(path), error=str(e))
            raise DataFormatError(str(e.errors()[0]["msg"]), str(path)) from e
        except Exception as e:
            logger.error("jsi_repository.load_jsi.error", path=str(path), error=str(e))
            raise
        logger.info(
            "jsi_repository.loaded", path=str(path), shape=jsi.intensity.shape, unit=unit.value
        )
        return jsi

    def save_jsi(self, jsi: JointSpectrum, path: PathLike) -> Path:
        return self._save(
            path,
            jsi.grid_s,
            jsi.grid_i,
            jsi.intensity,
            {"unit": jsi.unit.value, "pump_center_rad_per_fs": repr(jsi.pump_center)},
        )

    def save_jti(self, jti: JointTemporal, path: PathLike) -> Path:
        """Write a JTI grid, times in fs."""
        return self._save(path, jti.grid_ts, jti.grid_ti, jti.intensity, {"unit": "fs"})

    def _save(
        self,
        path: PathLike,
        rows: np.ndarray,
        columns: np.ndarray,
        values: np.ndarray,
        comments: dict,
    ) -> Path:
        # axis values may repeat after formatting (0 among them), so no labels
        axis_row = np.concatenate([[0.0], columns])
        frame = pd.DataFrame(np.vstack([axis_row, np.column_stack([rows, values])]))
        try:
            written = write_with_comments(Path(path), frame, comments, header=False)
        except OSError as e:
            logger.error("jsi_repository.save.error", path=str(path), error=str(e))
            raise
        logger.info("jsi_repository.saved", path=str(written), shape=values.shape)
        return written
