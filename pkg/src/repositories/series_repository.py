"""Count-series and rate files.

Count series are CSV with columns ``t_start_s, counts, phase``. Comment
headers carry the end of the last bin (``# t_end_s=``), the excitation power
(``# power_uW=``), the label and the generator seed.
"""

import glob
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import structlog
from pydantic import ValidationError

from ..models.series import ChopperPhase, CountSeries
from ..utils.exceptions import DataFormatError
from .tabular import read_text_table, write_with_comments

logger = structlog.get_logger("series_repository")

PathLike = Union[str, Path]
SERIES_COLUMNS = ("t_start_s", "counts", "phase")
PHASE_VALUES = {phase.value for phase in ChopperPhase}


class SeriesRepository:
    """Reads and writes CountSeries files and evenly spaced rate records."""

    def load(self, path: PathLike) -> CountSeries:
        """
        Load one count series.

        Args:
            path: CSV file

        Returns:
            CountSeries with its power and label restored

        Raises:
            DataFormatError: On malformed rows, unknown phases or bad metadata
        """
        path = Path(path)
        try:
            table = read_text_table(path)
            header = tuple(cell.lower() for cell in table.header or ())
            if header != SERIES_COLUMNS:
                raise DataFormatError(f"expected the header {','.join(SERIES_COLUMNS)}", str(path))
            numbers = table.numeric(columns=[0, 1])
            phases = table.frame.iloc[:, 2].str.lower().tolist()
            for row, phase in enumerate(phases):
                if phase not in PHASE_VALUES:
                    raise DataFormatError(f"unknown phase {phase!r}", str(path), table.line_of(row))
            starts = numbers[:, 0]
            series = CountSeries(
                bin_edges=np.append(starts, self._end_time(table.meta, starts, path)),
                counts=numbers[:, 1],
                phases=tuple(phases),
                power_uw=_optional_float(table.meta, "power_uW", path),
                label=table.meta.get("label", path.stem),
            )
        except ValidationError as e:
            logger.error("series_repository.load.error", path=str(path), error=str(e))
            raise DataFormatError(str(e.errors()[0]["msg"]), str(path)) from e
        except Exception as e:
            logger.error("series_repository.load.error", path=str(path), error=str(e))
            raise
        logger.debug("series_repository.loaded", path=str(path), bins=series.counts.size)
        return series

    def load_glob(self, pattern: str) -> List[CountSeries]:
        """Load every file matching ``pattern`` in sorted order."""
        paths = sorted(glob.glob(pattern))
        if not paths:
            raise FileNotFoundError(f"no count-series files match {pattern!r}")
        return [self.load(path) for path in paths]

    def seeds(self, pattern: str) -> Dict[str, Optional[int]]:
        """The ``rng_seed`` header of every file matching ``pattern``."""
        seeds: Dict[str, Optional[int]] = {}
        for path in sorted(glob.glob(pattern)):
            meta = read_text_table(Path(path)).meta
            seeds[path] = int(meta["rng_seed"]) if "rng_seed" in meta else None
        return seeds

    def save(
        self, series: CountSeries, path: PathLike, rng_seed: Optional[int] = None
    ) -> Path:
        frame = pd.DataFrame(
            {
                "t_start_s": series.bin_edges[:-1],
                "counts": series.counts,
                "phase": [phase.value for phase in series.phases],
            }
        )
        comments: Dict[str, object] = {"t_end_s": repr(float(series.bin_edges[-1]))}
        if series.power_uw is not None:
            comments["power_uW"] = repr(series.power_uw)
        if series.label:
            comments["label"] = series.label
        if rng_seed is not None:
            comments["rng_seed"] = rng_seed
        try:
            return write_with_comments(Path(path), frame, comments)
        except OSError as e:
            logger.error("series_repository.save.error", path=str(path), error=str(e))
            raise

    def save_many(
        self, series_list: Sequence[CountSeries], out_dir: PathLike, stem: str, rng_seed: int
    ) -> List[Path]:
        """Write each series as ``<stem>_<index>.csv``."""
        out = Path(out_dir)
        return [
            self.save(series, out / f"{stem}_{index:03d}.csv", rng_seed)
            for index, series in enumerate(series_list, start=1)
        ]

    def load_rates(self, path: PathLike) -> Tuple[np.ndarray, float]:
        """
        Evenly spaced rates for Allan analysis.

        A single column of rates needs a ``# interval_s=`` header; a two-column
        file (time, rate) takes the interval from the time step.
        """
        path = Path(path)
        try:
            table = read_text_table(path)
            values = table.numeric()
            if values.shape[1] == 1:
                if "interval_s" not in table.meta:
                    raise DataFormatError("single-column rates need '# interval_s='", str(path))
                return values[:, 0], float(table.meta["interval_s"])
            if values.shape[1] != 2:
                raise DataFormatError("expected columns time_s, rate_cps", str(path))
            steps = np.diff(values[:, 0])
            if steps.size == 0 or not np.allclose(steps, steps[0], rtol=1e-6):
                raise DataFormatError("rate samples must be evenly spaced", str(path))
            return values[:, 1], float(steps[0])
        except Exception as e:
            logger.error("series_repository.load_rates.error", path=str(path), error=str(e))
            raise

    @staticmethod
    def _end_time(meta: Dict[str, str], starts: np.ndarray, path: Path) -> float:
        end = _optional_float(meta, "t_end_s", path)
        if end is not None:
            return end
        if starts.size < 2:
            raise DataFormatError("a single bin needs a '# t_end_s=' header", str(path))
        return float(starts[-1] + (starts[-1] - starts[-2]))


def _optional_float(meta: Dict[str, str], key: str, path: Path) -> Optional[float]:
    if key not in meta:
        return None
    try:
        return float(meta[key])
    except ValueError as e:
        raise DataFormatError(f"header {key} is not a number: {meta[key]!r}", str(path)) from e
