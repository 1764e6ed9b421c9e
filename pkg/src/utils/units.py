"""Physical constants and unit conversions.

Internally every computation runs in CGS + seconds so that GM (1e-50 cm^4 s)
converts with a single factor. All conversions live here.
"""

import math

from scipy import constants

from .exceptions import DomainError


# Physical constants
AVOGADRO = constants.N_A  # mol^-1
PLANCK_J_S = constants.h  # J s
SPEED_OF_LIGHT_M_PER_S = constants.c
SPEED_OF_LIGHT_NM_PER_FS = constants.c * 1e-6  # nm fs^-1

# Unit factors (multiply to convert to CGS / seconds)
GM_TO_CM4_S = 1e-50
UM_TO_CM = 1e-4
MM_TO_CM = 0.1
NM_TO_CM = 1e-7
FS_TO_S = 1e-15
NS_TO_S = 1e-9
UW_TO_W = 1e-6
CM2_TO_UM2 = 1e8
UMOL_TO_MOL = 1e-6

FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))


def number_density(concentration_mol_per_l: float) -> float:
    """
    Convert a molar concentration to a number density.

    Args:
        concentration_mol_per_l: Concentration in mol L^-1

    Returns:
        Fluorophores per cm^3

    Raises:
        DomainError: If the concentration is not positive
    """
    if not concentration_mol_per_l > 0:
        raise DomainError(f"concentration must be positive, got {concentration_mol_per_l}")
    return concentration_mol_per_l * AVOGADRO / 1000.0


def photon_energy(wavelength_nm: float) -> float:
    """Photon energy in J for a vacuum wavelength in nm."""
    if not wavelength_nm > 0:
        raise DomainError(f"wavelength must be positive, got {wavelength_nm}")
    return PLANCK_J_S * SPEED_OF_LIGHT_M_PER_S / (wavelength_nm * 1e-9)


def wavelength_to_angular_frequency(wavelength_nm: float) -> float:
    """Angular frequency in rad fs^-1."""
    return 2.0 * math.pi * SPEED_OF_LIGHT_NM_PER_FS / wavelength_nm


def bandwidth_nm_to_angular(fwhm_nm: float, center_nm: float) -> float:
    """Convert a spectral FWHM in nm to rad fs^-1 around ``center_nm``."""
    return 2.0 * math.pi * SPEED_OF_LIGHT_NM_PER_FS * fwhm_nm / center_nm**2


def gm_to_cgs(sigma_gm: float) -> float:
    return sigma_gm * GM_TO_CM4_S


def cm2_to_um2(area_cm2: float) -> float:
    return area_cm2 * CM2_TO_UM2


def um2_to_cm2(area_um2: float) -> float:
    return area_um2 / CM2_TO_UM2
