"""Evaluation package initialization"""

from .calibration import CalibrationCase, CalibrationResult, CalibrationSuite

__all__ = [
    "CalibrationCase",
    "CalibrationResult",
    "CalibrationSuite",
]
