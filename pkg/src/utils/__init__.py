"""Utils package initialization."""

from .exceptions import (
    ConfigError,
    CutoffError,
    DataFormatError,
    DomainError,
    E2PAError,
    GridError,
    SaturationError,
    SingularityError,
    UnreachableError,
    exit_code_for,
)
from .units import number_density

__all__ = [
    "E2PAError",
    "DomainError",
    "SingularityError",
    "SaturationError",
    "UnreachableError",
    "CutoffError",
    "GridError",
    "ConfigError",
    "DataFormatError",
    "exit_code_for",
    "number_density",
]
