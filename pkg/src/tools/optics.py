"""
Optics Tools
Gaussian-beam geometry, peak photon flux, the erfc collection-efficiency
model K(z) and the one-photon fluorescence calibration of its scale.
"""

import math
from typing import Optional, Union

import numpy as np
import structlog
from scipy.integrate import quad
from scipy.special import erfc

from ..models.apparatus import BeamProfile, CollectionModel
from ..models.uncertainty import UncertainValue
from ..utils.exceptions import DomainError, SingularityError
from ..utils.units import FS_TO_S, MM_TO_CM, UM_TO_CM
from .stats import propagate

logger = structlog.get_logger("optics")

LN2 = math.log(2.0)
# (4 ln2 / pi)^(3/2): Gaussian peak-to-mean factor in x, y and t
PEAK_FACTOR = (4.0 * LN2 / math.pi) ** 1.5
QUAD_EPSREL = 1e-6
DEFAULT_ALPHA_PER_MM = 2.78
DEFAULT_Z0_MM = 1.51

ArrayLike = Union[float, np.ndarray]


def beam_fwhm_at(beam: BeamProfile, z_mm: ArrayLike, axis: str = "x") -> ArrayLike:
    """FWHM in um at axial position ``z_mm``: w0 sqrt(1 + (z/zR)^2)."""
    if axis not in ("x", "y"):
        raise DomainError(f"axis must be 'x' or 'y', got {axis!r}")
    w0 = beam.fwhm_x0_um if axis == "x" else beam.fwhm_y0_um
    return w0 * np.sqrt(1.0 + (np.asarray(z_mm, dtype=float) / beam.rayleigh_mm) ** 2)


def _widths_cm(beam: BeamProfile, z_mm: ArrayLike) -> tuple:
    return beam_fwhm_at(beam, z_mm, "x") * UM_TO_CM, beam_fwhm_at(beam, z_mm, "y") * UM_TO_CM


def effective_area(beam: BeamProfile, z_mm: float = 0.0) -> float:
    """Effective beam area pi dx dy / (2 ln2) in cm^2."""
    dx, dy = _widths_cm(beam, z_mm)
    return float(math.pi * dx * dy / (2.0 * LN2))


def mean_photons_per_pulse(beam: BeamProfile) -> float:
    return beam.photon_rate_q / beam.rep_rate_hz


def flux_per_photon(beam: BeamProfile, z_mm: float = 0.0) -> float:
    """Peak flux produced by one photon per pulse, in cm^-2 s^-1."""
    dx, dy = _widths_cm(beam, z_mm)
    return float(PEAK_FACTOR / (dx * dy * beam.pulse_fwhm_fs * FS_TO_S))


def peak_flux(beam: BeamProfile, z_mm: float = 0.0) -> float:
    """
    Peak photon flux of the pulse train at ``z_mm``.

    Args:
        beam: Beam with a known photon rate or power
        z_mm: Axial position relative to the focus

    Returns:
        Q (4 ln2/pi)^(3/2) / (dx dy g tau) in photons cm^-2 s^-1
    """
    return mean_photons_per_pulse(beam) * flux_per_photon(beam, z_mm)


def peak_flux_from_mu(beam: BeamProfile, mu: float, z_mm: float = 0.0) -> float:
    if mu < 0:
        raise DomainError("mu must be non-negative")
    return mu * flux_per_photon(beam, z_mm)


def power_for_peak_flux(beam: BeamProfile, phi0: float, z_mm: float = 0.0) -> float:
    """Average power in uW that yields peak flux ``phi0``."""
    if phi0 < 0:
        raise DomainError("flux must be non-negative")
    photon_rate = phi0 / flux_per_photon(beam, z_mm) * beam.rep_rate_hz
    return photon_rate * beam.photon_energy_j / 1e-6


def peak_flux_mode_form(beam: BeamProfile, mu: float, z_mm: float = 0.0) -> float:
    """Alternative flux expression 2 sqrt(2) mu / (T A), kept as a cross-check."""
    t_eff = beam.pulse_fwhm_fs * FS_TO_S / math.sqrt(2.0 * LN2)
    return 2.0 * math.sqrt(2.0) * mu / (t_eff * effective_area(beam, z_mm))


def flux_form_discrepancy(beam: BeamProfile) -> float:
    """Ratio of the mode form to the Gaussian-normalized form (sqrt(pi))."""
    ratio = peak_flux_mode_form(beam, 1.0) / peak_flux_from_mu(beam, 1.0)
    logger.warning(
        "optics.flux_form_discrepancy",
        ratio=ratio,
        note="mode-form flux is not Gaussian-normalized; peak_flux is authoritative",
    )
    return ratio


def flux_profile(
    beam: BeamProfile, x_um: ArrayLike, y_um: ArrayLike, z_mm: float, t_fs: ArrayLike
) -> ArrayLike:
    """Photon flux phi(x, y, z, t) of the central pulse, photons cm^-2 s^-1."""
    dx = beam_fwhm_at(beam, z_mm, "x")
    dy = beam_fwhm_at(beam, z_mm, "y")
    exponent = (
        (np.asarray(x_um) / dx) ** 2
        + (np.asarray(y_um) / dy) ** 2
        + (np.asarray(t_fs) / beam.pulse_fwhm_fs) ** 2
    )
    return peak_flux(beam, z_mm) * np.exp(-4.0 * LN2 * exponent)


def peak_flux_uncertainty(
    beam: BeamProfile,
    mu: float,
    rel_u_mu: float,
    rel_u_x: float,
    rel_u_y: float,
    rel_u_tau: float,
    coverage_k: float = 2.0,
    z_mm: float = 0.0,
) -> UncertainValue:
    """Peak flux for ``mu`` with its propagated uncertainty (horizontal error bars)."""
    dx, dy = _widths_cm(beam, z_mm)
    tau_s = beam.pulse_fwhm_fs * FS_TO_S
    return propagate(
        [
            (UncertainValue.from_relative(PEAK_FACTOR, 0.0), 1.0),
            (UncertainValue.from_relative(mu, rel_u_mu), 1.0),
            (UncertainValue.from_relative(float(dx), rel_u_x), -1.0),
            (UncertainValue.from_relative(float(dy), rel_u_y), -1.0),
            (UncertainValue.from_relative(tau_s, rel_u_tau), -1.0),
        ],
        coverage_k=coverage_k,
    )


def collection_k(model: CollectionModel, z_mm: ArrayLike) -> ArrayLike:
    """Collection efficiency K(z) = kappa_max/2 erfc(alpha (|z| - z0)), z in mm."""
    z = np.abs(np.asarray(z_mm, dtype=float))
    return 0.5 * model.kappa_max * erfc(model.alpha_per_mm * (z - model.z0_mm))


def collection_integral(model: CollectionModel, half_length_mm: float) -> float:
    """Integral of K(z) over [-half, half], returned in cm."""
    if half_length_mm <= 0:
        raise DomainError("integration half-length must be positive")
    value, _ = quad(
        lambda z: float(collection_k(model, z)),
        -half_length_mm,
        half_length_mm,
        points=_breakpoints(model, half_length_mm),
        epsrel=QUAD_EPSREL,
        limit=200,
    )
    return value * MM_TO_CM


def collection_line_average(model: CollectionModel, half_length_mm: float) -> float:
    """Mean of K(z) over [-half, half]; the minimum collection efficiency of the cuvette."""
    return collection_integral(model, half_length_mm) / (2.0 * half_length_mm * MM_TO_CM)


def geometric_overlap_integral(
    model: CollectionModel, beam: BeamProfile, half_length_mm: float
) -> float:
    """Integral of K(z) / (dx(z) dy(z)) over the cuvette, in cm^-1."""
    if half_length_mm <= 0:
        raise DomainError("integration half-length must be positive")

    def integrand(z_mm: float) -> float:
        dx, dy = _widths_cm(beam, z_mm)
        return float(collection_k(model, z_mm) / (dx * dy))

    value, _ = quad(
        integrand,
        -half_length_mm,
        half_length_mm,
        points=_breakpoints(model, half_length_mm),
        epsrel=QUAD_EPSREL,
        limit=200,
    )
    return value * MM_TO_CM


def _breakpoints(model: CollectionModel, half_length_mm: float) -> Optional[list]:
    points = [p for p in (-model.z0_mm, 0.0, model.z0_mm) if -half_length_mm < p < half_length_mm]
    return points or None


def excitations_per_photon(epsilon: float, concentration: float, length_cm: float) -> float:
    """Absorbed fraction 1 - 10^(-epsilon c l)."""
    if epsilon < 0 or concentration < 0 or length_cm < 0:
        raise DomainError("epsilon, concentration and length must be non-negative")
    return float(-np.expm1(-epsilon * concentration * length_cm * math.log(10.0)))


def one_photon_fluorescence(
    kappa_min: float, optical_density: float, power_w: float, hnu: float, overlap_integral: float
) -> float:
    """Detected one-photon fluorescence rate for a collection efficiency ``kappa_min``."""
    absorbed = -math.expm1(-optical_density * math.log(10.0))
    return kappa_min * absorbed * (power_w / hnu) * overlap_integral


def calibrate_kappa_min(
    f1_cps: float, optical_density: float, power_w: float, hnu: float, overlap_integral: float
) -> float:
    """
    Minimum collection efficiency from a one-photon fluorescence measurement.

    Args:
        f1_cps: Measured 1PEF rate in counts s^-1
        optical_density: epsilon c l of the sample
        power_w: Excitation power in W
        hnu: Photon energy in J
        overlap_integral: integral(gamma Phi dlambda)

    Returns:
        kappa'_min
    """
    if f1_cps < 0 or optical_density < 0 or power_w < 0 or hnu <= 0 or overlap_integral < 0:
        raise DomainError("calibration inputs must be positive")
    absorbed = -math.expm1(-optical_density * math.log(10.0))
    denominator = absorbed * (power_w / hnu) * overlap_integral
    if denominator == 0:
        raise SingularityError("zero absorbed photon rate or overlap", factor="denominator")
    kappa = f1_cps / denominator
    logger.info("optics.calibrate_kappa_min", f1_cps=f1_cps, od=optical_density, kappa_min=kappa)
    return kappa


def rescale_collection(
    kappa_prime_min: float,
    kappa_min_sim: float,
    kappa_max_sim: float,
    base: Optional[CollectionModel] = None,
) -> CollectionModel:
    """Scale the simulated peak efficiency by the measured/simulated minimum ratio."""
    if kappa_min_sim <= 0 or kappa_max_sim <= 0:
        raise DomainError("simulated efficiencies must be positive")
    alpha = base.alpha_per_mm if base else DEFAULT_ALPHA_PER_MM
    z0 = base.z0_mm if base else DEFAULT_Z0_MM
    kappa_max = kappa_prime_min / kappa_min_sim * kappa_max_sim
    return CollectionModel(kappa_max=kappa_max, alpha_per_mm=alpha, z0_mm=z0)
