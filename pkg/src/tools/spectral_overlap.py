"""
Collected-emission overlap integral.

gamma(lambda) multiplies every optical element between the cuvette and the
detector; the spherical mirror behind the cuvette returns a second pass that
crosses the cuvette twice.
"""

from typing import Iterable, List, Optional, Sequence

import numpy as np
import structlog
from scipy.integrate import trapezoid

from ..models.sample import Spectrum, SpectrumKind
from ..utils.exceptions import DomainError, GridError

logger = structlog.get_logger("spectral_overlap")


def _on_grid(spectrum: Spectrum, grid: np.ndarray, fill_outside: bool) -> np.ndarray:
    lower, upper = spectrum.lower_nm, spectrum.upper_nm
    if not fill_outside and (grid[0] < lower or grid[-1] > upper):
        missing: List[str] = []
        if grid[0] < lower:
            missing.append(f"[{grid[0]:g}, {lower:g}] nm")
        if grid[-1] > upper:
            missing.append(f"[{upper:g}, {grid[-1]:g}] nm")
        raise GridError(
            f"spectrum {spectrum.name or spectrum.kind.value!r} does not cover "
            + " and ".join(missing)
        )
    return np.interp(grid, spectrum.wavelength_nm, spectrum.intensity, left=0.0, right=0.0)


def union_grid(spectra: Iterable[Spectrum], lower_nm: float, upper_nm: float) -> np.ndarray:
    """All sample points of ``spectra`` inside [lower_nm, upper_nm], plus the end points."""
    points = [np.array([lower_nm, upper_nm])]
    for spectrum in spectra:
        w = spectrum.wavelength_nm
        points.append(w[(w >= lower_nm) & (w <= upper_nm)])
    return np.unique(np.concatenate(points))


def collection_efficiency(
    grid: np.ndarray,
    chain: Sequence[Spectrum],
    qe: Spectrum,
    sph_mirror_r: Spectrum,
    cuvette: Optional[Spectrum] = None,
    fill_outside: bool = False,
) -> np.ndarray:
    """gamma(lambda) on ``grid``."""
    gamma = np.ones_like(grid)
    for element in chain:
        gamma *= _on_grid(element, grid, fill_outside)
    t_cuvette = _on_grid(cuvette, grid, fill_outside) if cuvette is not None else np.ones_like(grid)
    reflectance = _on_grid(sph_mirror_r, grid, fill_outside)
    gamma *= t_cuvette * 0.5 * (1.0 + t_cuvette**2 * reflectance)
    gamma *= _on_grid(qe, grid, fill_outside)
    return gamma


def spectral_overlap(
    emission: Spectrum,
    chain: Sequence[Spectrum],
    qe: Spectrum,
    sph_mirror_r: Spectrum,
    cuvette: Optional[Spectrum] = None,
    quantum_yield: Optional[float] = None,
    fill_outside: bool = False,
) -> float:
    """
    Integrate gamma(lambda) Phi(lambda) over the emission band.

    Args:
        emission: Emission spectrum, normalized so its integral equals Phi
        chain: Filters and lenses on the detection path
        qe: Detector quantum efficiency
        sph_mirror_r: Reflectance of the spherical mirror behind the cuvette
        cuvette: Cuvette wall transmittance (unity when omitted)
        quantum_yield: When given, the emission is first normalized to this value
        fill_outside: Treat components as opaque outside their tabulated range
            instead of raising

    Returns:
        integral(gamma(lambda) Phi(lambda) dlambda), dimensionless

    Raises:
        GridError: If a component does not cover the emission band
    """
    if emission.kind != SpectrumKind.EMISSION:
        raise DomainError(f"expected an emission spectrum, got {emission.kind.value}")
    if quantum_yield is not None:
        emission = emission.normalized_to(quantum_yield)

    others: List[Spectrum] = [*chain, qe, sph_mirror_r] + ([cuvette] if cuvette is not None else [])
    grid = union_grid([emission, *others], emission.lower_nm, emission.upper_nm)
    gamma = collection_efficiency(grid, chain, qe, sph_mirror_r, cuvette, fill_outside)
    phi = np.interp(grid, emission.wavelength_nm, emission.intensity)
    overlap = float(trapezoid(gamma * phi, grid))

    logger.debug(
        "spectral_overlap.computed",
        emission=emission.name,
        elements=len(others),
        grid_points=int(grid.size),
        overlap=overlap,
    )
    return overlap


def spectral_overlap_ratio(
    emission: Spectrum,
    chain: Sequence[Spectrum],
    qe: Spectrum,
    sph_mirror_r: Spectrum,
    quantum_yield: float,
    cuvette: Optional[Spectrum] = None,
    fill_outside: bool = False,
) -> float:
    """The overlap divided by the quantum yield, as tabulated per sample."""
    if not quantum_yield > 0:
        raise DomainError("quantum yield must be positive")
    overlap = spectral_overlap(
        emission, chain, qe, sph_mirror_r, cuvette, quantum_yield, fill_outside
    )
    return overlap / quantum_yield
