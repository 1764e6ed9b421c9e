"""Repositories package initialization: file formats for inputs and reports."""

from .config_repository import ConfigRepository
from .jsi_repository import JsiRepository
from .report_repository import ReportEmitter
from .series_repository import SeriesRepository
from .spectrum_repository import SpectrumRepository

__all__ = [
    "ConfigRepository",
    "JsiRepository",
    "ReportEmitter",
    "SeriesRepository",
    "SpectrumRepository",
]
