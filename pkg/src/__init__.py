"""Package initialization"""

__version__ = "1.0.0"
__description__ = "Entangled two-photon absorption sensitivity bounds and analysis"
