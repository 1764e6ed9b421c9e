"""Shared reader for the comma- or whitespace-separated text files.

Blank lines are skipped. Lines starting with ``#`` are comments; comments of
the form ``# key=value`` are collected as metadata. Every data row keeps its
original line number so parse errors can point at it.
"""

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
import structlog

from ..utils.exceptions import DataFormatError

logger = structlog.get_logger("tabular")

COMMA = ","
WHITESPACE_OR_COMMA = r"[,\s]+"


@dataclass
class TextTable:
    """Raw string cells of a data file plus its metadata comments."""

    path: Path
    frame: pd.DataFrame
    line_numbers: List[int]
    meta: Dict[str, str] = field(default_factory=dict)
    header: Optional[List[str]] = None

    def line_of(self, row: int) -> int:
        return self.line_numbers[row]

    def numeric(self, columns: Optional[Sequence[int]] = None, first_row: int = 0) -> np.ndarray:
        """Cells as floats; the first non-numeric or missing cell raises with its line number."""
        frame = self.frame.iloc[first_row:]
        if columns is not None:
            frame = frame.iloc[:, list(columns)]
        values = frame.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=float)
        bad_rows, bad_cols = np.nonzero(~np.isfinite(values))
        if bad_rows.size:
            row, col = int(bad_rows[0]), int(bad_cols[0])
            cell = frame.iat[row, col]
            raise DataFormatError(
                f"expected a number in column {col + 1}, found {cell!r}",
                str(self.path),
                self.line_of(first_row + row),
            )
        return values


def _is_numeric_row(cells: Sequence[object]) -> bool:
    converted = pd.to_numeric(pd.Series(list(cells), dtype=object), errors="coerce")
    return bool(converted.notna().all())


def read_text_table(path: Path, sep: str = COMMA, allow_header: bool = True) -> TextTable:
    """
    Read a delimited text file into string cells.

    Args:
        path: File to read
        sep: Column separator (a regex for whitespace-separated files)
        allow_header: Treat a non-numeric first row as column names

    Returns:
        TextTable

    Raises:
        DataFormatError: On an empty file or ragged rows
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        logger.error("tabular.read.error", path=str(path), error=str(e))
        raise

    meta: Dict[str, str] = {}
    rows: List[str] = []
    numbers: List[int] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
            continue
        rows.append(line)
        numbers.append(number)
    if not rows:
        raise DataFormatError("file has no data rows", str(path))

    width = None
    for row, number in zip(rows, numbers):
        cells = len(pd.Series([row]).str.split(sep, regex=sep != COMMA)[0])
        if width is None:
            width = cells
        elif cells != width:
            raise DataFormatError(f"expected {width} columns, found {cells}", str(path), number)

    frame = pd.read_csv(
        io.StringIO("\n".join(rows)),
        sep=sep,
        header=None,
        dtype=str,
        engine="python",
        skipinitialspace=True,
    )
    header = None
    if allow_header and not _is_numeric_row(frame.iloc[0].tolist()):
        header = [str(cell).strip() for cell in frame.iloc[0].tolist()]
        frame = frame.iloc[1:].reset_index(drop=True)
        numbers = numbers[1:]
        if frame.empty:
            raise DataFormatError("file has a header but no data rows", str(path))
    frame = frame.apply(lambda column: column.str.strip())
    return TextTable(path=path, frame=frame, line_numbers=numbers, meta=meta, header=header)


def write_with_comments(
    path: Path, frame: pd.DataFrame, comments: Dict[str, object], header: bool = True
) -> Path:
    """Write ``# key=value`` comment lines followed by ``frame`` as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        for key, value in comments.items():
            handle.write(f"# {key}={value}\n")
        frame.to_csv(handle, index=False, header=header, float_format="%.10g")
    return path
