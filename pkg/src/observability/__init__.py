"""Observability package initialization"""

from .monitoring import ObservabilityManager, configure_logging

__all__ = [
    "configure_logging",
    "ObservabilityManager",
]
