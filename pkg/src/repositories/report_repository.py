"""Report emission: a human-readable text report plus CSV record files.

Every write goes through one ReportEmitter, which serializes them so the
report stays in submission order even when results are produced
concurrently. Reports carry no timestamps; rerunning a command with the same
inputs reproduces them byte for byte.
"""

import threading
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, TextIO, Union

import pandas as pd
import structlog

logger = structlog.get_logger("report_repository")

PathLike = Union[str, Path]
FLOAT_FORMAT = "%.6g"


def format_value(value: Any) -> str:
    """Stable text for report values."""
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, (list, tuple)):
        return ", ".join(format_value(item) for item in value)
    if isinstance(value, Path):
        return value.as_posix()
    return str(value)


class ReportEmitter:
    """Collects report lines and writes record tables for one command."""

    def __init__(self, command: str, out_dir: Optional[PathLike], stream: Optional[TextIO] = None):
        self.command = command
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.stream = stream
        self.written: List[Path] = []
        self._lines: List[str] = []
        self._lock = threading.Lock()
        self._closed = False

    def _append(self, lines: Sequence[str]) -> None:
        with self._lock:
            if self._closed:
                raise RuntimeError("report already closed")
            self._lines.extend(lines)
            if self.stream is not None:
                self.stream.write("\n".join(lines) + "\n")

    def provenance(self, inputs: Mapping[str, Any]) -> None:
        """Echo every input so the report alone reproduces the run."""
        block = [f"# e2pa {self.command}", "[inputs]"]
        block += [f"{key} = {format_value(inputs[key])}" for key in sorted(inputs)]
        self._append(block + [""])

    def section(self, title: str) -> None:
        self._append([f"[{title}]"])

    def line(self, text: str = "") -> None:
        self._append([text])

    def values(self, values: Mapping[str, Any]) -> None:
        self._append([f"{key} = {format_value(value)}" for key, value in values.items()])

    def table(self, name: str, frame: pd.DataFrame, write_csv: bool = True) -> Optional[Path]:
        """Render ``frame`` into the report and, with an output directory, as ``<name>.csv``."""
        text = frame.to_string(index=False, float_format=lambda v: FLOAT_FORMAT % v)
        self._append([f"[{name}]", *text.splitlines(), ""])
        if write_csv and self.out_dir is not None:
            return self._write_csv(name, frame)
        return None

    def records(self, name: str, rows: Sequence[Dict[str, Any]]) -> Optional[Path]:
        """Machine-readable records only; not rendered into the text report."""
        if self.out_dir is None:
            return None
        return self._write_csv(name, pd.DataFrame(list(rows)))

    def note_file(self, path: PathLike) -> None:
        with self._lock:
            self.written.append(Path(path))

    def _write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        assert self.out_dir is not None
        path = self.out_dir / f"{name}.csv"
        try:
            with self._lock:
                self.out_dir.mkdir(parents=True, exist_ok=True)
                frame.to_csv(path, index=False, float_format="%.10g")
                self.written.append(path)
        except OSError as e:
            logger.error("report_repository.write_csv.error", path=str(path), error=str(e))
            raise
        return path

    def text(self) -> str:
        with self._lock:
            return "\n".join(self._lines) + "\n"

    def close(self) -> Optional[Path]:
        """Write ``<command>_report.txt`` to the output directory, if any."""
        report = self.text()
        with self._lock:
            self._closed = True
        if self.out_dir is None:
            return None
        path = self.out_dir / f"{self.command.replace('-', '_')}_report.txt"
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            path.write_text(report)
        except OSError as e:
            logger.error("report_repository.close.error", path=str(path), error=str(e))
            raise
        logger.info("report_repository.written", path=str(path), files=len(self.written))
        return path
