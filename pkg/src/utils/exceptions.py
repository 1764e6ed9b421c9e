"""Exception hierarchy for the analysis pipeline.

Each error carries the process exit code the CLI reports for it.
"""

from typing import List, Optional

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


class E2PAError(Exception):
    """Base class for all pipeline errors."""

    exit_code = EXIT_NUMERIC


class DomainError(E2PAError, ValueError):
    """An argument lies outside the domain of an operation."""


class SingularityError(E2PAError, ZeroDivisionError):
    """A denominator factor vanished."""

    def __init__(self, message: str, factor: Optional[str] = None):
        super().__init__(message)
        self.factor = factor


class SaturationError(E2PAError):
    """The dead-time correction hit its pole."""


class UnreachableError(E2PAError):
    """A root-solve target lies outside the attainable range."""


class CutoffError(E2PAError):
    """Photon-number truncation leaves too much probability in the tail."""

    def __init__(self, message: str, tail_mass: float):
        super().__init__(message)
        self.tail_mass = tail_mass


class GridError(E2PAError):
    """A grid is under-resolved, non-uniform, mismatched or has a coverage gap."""


class ConfigError(E2PAError):
    """Configuration problems, reported together."""

    exit_code = EXIT_CONFIG

    def __init__(self, problems: List[str]):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


class DataFormatError(E2PAError):
    """A data file could not be parsed."""

    exit_code = EXIT_IO

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the CLI exit code."""
    if isinstance(error, E2PAError):
        return error.exit_code
    if isinstance(error, OSError):
        return EXIT_IO
    return EXIT_NUMERIC
