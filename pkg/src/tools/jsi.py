"""
Joint Spectral Tools
Photon-pair joint spectral intensity (JSI) synthesis and resampling, quadratic
dispersion, the discrete Fourier transform to the joint temporal intensity
(JTI), entanglement time and coincidence ratios.

Frequencies are angular detunings in rad fs^-1 and times are in fs.
"""

import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from scipy.interpolate import RegularGridInterpolator

from ..models.spectral import DispersionSpec, GridUnit, JointSpectrum, JointTemporal
from ..utils.exceptions import DomainError, GridError, SingularityError
from ..utils.units import (
    FWHM_TO_SIGMA,
    SPEED_OF_LIGHT_NM_PER_FS,
    bandwidth_nm_to_angular,
    wavelength_to_angular_frequency,
)

logger = structlog.get_logger("jsi")

FWHM_PER_SIGMA = 1.0 / FWHM_TO_SIGMA
MIN_POINTS_PER_FWHM = 16
DEFAULT_EXTENT_FWHM = 4.0
DEFAULT_PADDING = 2
DEFAULT_PUMP_FWHM_FS = 650.0
# time window per unit of chirp spread (|beta| * FWHM_omega) and per pump FWHM
WINDOW_PER_CHIRP = 4.0
WINDOW_PER_PULSE = 4.0
GRID_MULTIPLE = 64

ArrayLike = Union[float, np.ndarray]


def tof_wavelength_map(
    arrival_delay_ns: ArrayLike,
    fiber_dispersion: float,
    fiber_length_km: float,
    ref_wavelength_nm: float = 810.0,
) -> ArrayLike:
    """
    Wavelength from arrival delay through a dispersive fiber.

    Args:
        arrival_delay_ns: Delay relative to the reference wavelength, ns
        fiber_dispersion: ns nm^-1 km^-1
        fiber_length_km: Fiber length, km
        ref_wavelength_nm: Wavelength arriving at zero delay

    Returns:
        Wavelength in nm
    """
    spread = fiber_dispersion * fiber_length_km
    if spread == 0:
        raise SingularityError("fiber dispersion times length is zero", factor="dispersion")
    return ref_wavelength_nm + np.asarray(arrival_delay_ns, dtype=float) / spread


def gaussian_jsi_covariance(
    fwhm_s: float, fwhm_i: float, anticorrelation: float, min_sigma: float
) -> np.ndarray:
    """
    Covariance of a Gaussian JSI over (detuning_s, detuning_i).

    Marginal FWHMs are taken as given; the correlation coefficient is
    -anticorrelation. Principal variances are floored at ``min_sigma``^2, which
    sets the sum-frequency width of a fully anticorrelated JSI.
    """
    if not 0 <= anticorrelation <= 1:
        raise DomainError(f"anticorrelation must lie in [0, 1], got {anticorrelation}")
    sigma_s, sigma_i = fwhm_s * FWHM_TO_SIGMA, fwhm_i * FWHM_TO_SIGMA
    off = -anticorrelation * sigma_s * sigma_i
    cov = np.array([[sigma_s**2, off], [off, sigma_i**2]])
    values, vectors = np.linalg.eigh(cov)
    values = np.maximum(values, min_sigma**2)
    return (vectors * values) @ vectors.T


def pump_limited_sigma(pump_fwhm_fs: float) -> float:
    """
    Sum-frequency principal sigma of a JSI pumped by a transform-limited pulse.

    Pair creation times follow the pump intensity, so (t_s + t_i) / 2 carries
    the pump width and the conjugate principal variance is 1 / (8 sigma_pump^2).
    """
    if pump_fwhm_fs <= 0:
        raise DomainError(f"pump FWHM must be positive, got {pump_fwhm_fs}")
    return 1.0 / (2.0 * math.sqrt(2.0) * pump_fwhm_fs * FWHM_TO_SIGMA)


def time_window_fs(width_omega: float, gdd_fs2: float, pulse_fwhm_fs: float = 0.0) -> float:
    """
    Temporal window a frequency grid must span to hold a chirped JTI without wrap-around.

    Args:
        width_omega: Widest marginal FWHM, rad fs^-1
        gdd_fs2: Quadratic phase per photon
        pulse_fwhm_fs: Longest unchirped pulse the JTI must also hold

    Returns:
        Window 2 pi / step in fs
    """
    return max(WINDOW_PER_CHIRP * abs(gdd_fs2) * width_omega, WINDOW_PER_PULSE * pulse_fwhm_fs)


def grid_points_for_window(span: float, window_fs: float) -> int:
    """Points per axis so that ``span`` rad/fs is sampled with step <= 2 pi / window."""
    needed = math.ceil(span * window_fs / (2.0 * math.pi))
    return GRID_MULTIPLE * max(1, math.ceil(needed / GRID_MULTIPLE))


def synthesize_gaussian_jsi(
    center_nm: float = 810.0,
    fwhm_s_nm: float = 76.0,
    fwhm_i_nm: float = 76.0,
    anticorrelation: float = 1.0,
    pump_fwhm_fs: float = DEFAULT_PUMP_FWHM_FS,
    gdd_fs2: float = 0.0,
    n_points: Optional[int] = None,
    extent_fwhm: float = DEFAULT_EXTENT_FWHM,
) -> JointSpectrum:
    """
    Gaussian JSI on a uniform angular-frequency grid around the degenerate frequency.

    For equal marginals the principal axes are the diagonal (sum frequency) and
    antidiagonal (difference frequency); anticorrelation=1 collapses the sum
    frequency to the bandwidth of a transform-limited pump of ``pump_fwhm_fs``.
    Without ``n_points`` the step is chosen so that the grid holds the JTI
    dispersed by ``gdd_fs2``.

    Args:
        center_nm: Degenerate wavelength (half the pump frequency)
        fwhm_s_nm: Signal marginal FWHM
        fwhm_i_nm: Idler marginal FWHM
        anticorrelation: 0 for a separable JSI, 1 for perfect anticorrelation
        pump_fwhm_fs: Pump pulse FWHM setting the sum-frequency width
        gdd_fs2: Largest quadratic phase the grid must hold
        n_points: Grid points per axis; derived from the time window when None
        extent_fwhm: Half-width of the grid in units of the wider marginal FWHM

    Returns:
        JointSpectrum in rad fs^-1

    Raises:
        GridError: If the grid has fewer than 16 points per FWHM
        DomainError: If a width is not positive
    """
    if fwhm_s_nm <= 0 or fwhm_i_nm <= 0:
        raise DomainError("marginal FWHMs must be positive")
    width_s = bandwidth_nm_to_angular(fwhm_s_nm, center_nm)
    width_i = bandwidth_nm_to_angular(fwhm_i_nm, center_nm)
    sum_sigma = pump_limited_sigma(pump_fwhm_fs)
    half_extent = extent_fwhm * max(width_s, width_i)
    window = time_window_fs(max(width_s, width_i), gdd_fs2, pump_fwhm_fs)
    if n_points is None:
        cell = 2.0 * math.pi / window
        n_points = grid_points_for_window(2.0 * half_extent, window)
    else:
        cell = 2.0 * half_extent / n_points
        if 2.0 * math.pi / cell < window:
            logger.warning("jsi.window_short", window_fs=2.0 * math.pi / cell, needed_fs=window)
    if min(width_s, width_i) / cell < MIN_POINTS_PER_FWHM:
        raise GridError(
            f"grid resolves the narrower marginal with {min(width_s, width_i) / cell:.1f} "
            f"points per FWHM; need >= {MIN_POINTS_PER_FWHM}"
        )
    detuning = (np.arange(n_points) - n_points // 2) * cell

    cov = gaussian_jsi_covariance(width_s, width_i, anticorrelation, sum_sigma)
    precision = np.linalg.inv(cov)
    ws, wi = np.meshgrid(detuning, detuning, indexing="ij")
    quad_form = precision[0, 0] * ws**2 + 2 * precision[0, 1] * ws * wi + precision[1, 1] * wi**2
    intensity = np.exp(-0.5 * quad_form)

    center = wavelength_to_angular_frequency(center_nm)
    logger.debug(
        "jsi.synthesized",
        n_points=n_points,
        cell=cell,
        fwhm_s=width_s,
        fwhm_i=width_i,
        anticorrelation=anticorrelation,
        sum_sigma=sum_sigma,
    )
    return JointSpectrum(
        grid_s=center + detuning,
        grid_i=center + detuning,
        intensity=intensity / intensity.sum(),
        unit=GridUnit.RAD_PER_FS,
        pump_center=center,
    )


def resample_to_frequency(jsi: JointSpectrum, n_points: Optional[int] = None) -> JointSpectrum:
    """
    Move a wavelength-gridded JSI onto a uniform angular-frequency grid.

    The intensity picks up the Jacobian lambda^2 / (2 pi c) per axis so that
    mass is conserved.
    """
    if jsi.unit == GridUnit.RAD_PER_FS:
        return jsi
    two_pi_c = 2.0 * math.pi * SPEED_OF_LIGHT_NM_PER_FS
    order_s = np.argsort(jsi.grid_s)
    order_i = np.argsort(jsi.grid_i)
    lam_s, lam_i = jsi.grid_s[order_s], jsi.grid_i[order_i]
    values = jsi.intensity[np.ix_(order_s, order_i)]
    density = values * np.outer(lam_s**2, lam_i**2) / two_pi_c**2
    interpolator = RegularGridInterpolator(
        (lam_s, lam_i), density, bounds_error=False, fill_value=0.0
    )

    n_s = n_points or lam_s.size
    n_i = n_points or lam_i.size
    omega_s = np.linspace(two_pi_c / lam_s[-1], two_pi_c / lam_s[0], n_s)
    omega_i = np.linspace(two_pi_c / lam_i[-1], two_pi_c / lam_i[0], n_i)
    grid_ls, grid_li = np.meshgrid(two_pi_c / omega_s, two_pi_c / omega_i, indexing="ij")
    resampled = interpolator((grid_ls, grid_li))
    resampled = np.clip(resampled, 0.0, None)
    total = resampled.sum()
    if total <= 0:
        raise GridError("resampled JSI has no mass")

    ws, wi = np.meshgrid(omega_s, omega_i, indexing="ij")
    center = float(np.sum(resampled * (ws + wi)) / (2.0 * total))
    logger.info("jsi.resampled", n_s=n_s, n_i=n_i, pump_center=center)
    return JointSpectrum(
        grid_s=omega_s,
        grid_i=omega_i,
        intensity=resampled / total,
        unit=GridUnit.RAD_PER_FS,
        pump_center=center,
    )


def _uniform_step(grid: np.ndarray, name: str) -> float:
    steps = np.diff(grid)
    if steps.size == 0 or steps[0] <= 0 or not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
        raise GridError(f"{name} grid is not uniform; resample the JSI first")
    return float(steps[0])


def apply_dispersion_and_transform(
    jsi: JointSpectrum, disp: DispersionSpec, padding: int = DEFAULT_PADDING
) -> JointTemporal:
    """
    Joint temporal intensity of a dispersed photon pair.

    The joint spectral amplitude is sqrt(JSI) times exp(i beta detuning^2 / 2)
    for each photon; a zero-padded, unitary 2-D DFT gives the temporal
    amplitude, whose modulus squared is returned.

    Raises:
        GridError: If the JSI is not on a uniform angular-frequency grid
    """
    if jsi.unit != GridUnit.RAD_PER_FS:
        raise GridError("JSI is gridded in wavelength; resample_to_frequency first")
    if padding < 1:
        raise DomainError("padding factor must be >= 1")
    step_s = _uniform_step(jsi.grid_s, "signal")
    step_i = _uniform_step(jsi.grid_i, "idler")

    detuning_s = jsi.grid_s - jsi.pump_center
    detuning_i = jsi.grid_i - jsi.pump_center
    beta = disp.gdd_fs2
    phase = 0.5 * beta * np.add.outer(detuning_s**2, detuning_i**2)
    jsa = np.sqrt(jsi.intensity) * np.exp(1j * phase)

    n_s, n_i = jsa.shape
    padded = np.zeros((padding * n_s, padding * n_i), dtype=complex)
    padded[:n_s, :n_i] = jsa
    jta = np.fft.fftshift(np.fft.fft2(padded, norm="ortho"))

    m_s, m_i = padded.shape
    dt_s = 2.0 * math.pi / (m_s * step_s)
    dt_i = 2.0 * math.pi / (m_i * step_i)
    grid_ts = (np.arange(m_s) - m_s // 2) * dt_s
    grid_ti = (np.arange(m_i) - m_i // 2) * dt_i
    jti = np.abs(jta) ** 2

    logger.debug("jsi.transformed", gdd_fs2=beta, dt_fs=dt_s, shape=jti.shape)
    return JointTemporal(grid_ts=grid_ts, grid_ti=grid_ti, intensity=jti)


def fwhm_of_profile(x: np.ndarray, y: np.ndarray) -> float:
    """
    Full width at half maximum with linear interpolation between samples.

    Raises:
        GridError: If the profile has no half-maximum crossing on either side
    """
    y = np.asarray(y, dtype=float)
    peak = int(np.argmax(y))
    half = 0.5 * y[peak]
    if not half > 0:
        raise GridError("profile has no positive maximum")
    below_left = np.flatnonzero(y[:peak] < half)
    below_right = np.flatnonzero(y[peak:] < half)
    if below_left.size == 0 or below_right.size == 0:
        raise GridError("profile has no half-maximum crossing; it is flat or truncated")
    i = below_left[-1]
    left = x[i] + (half - y[i]) * (x[i + 1] - x[i]) / (y[i + 1] - y[i])
    j = peak + below_right[0]
    right = x[j - 1] + (half - y[j - 1]) * (x[j] - x[j - 1]) / (y[j] - y[j - 1])
    return float(right - left)


def _common_step(jti: JointTemporal) -> float:
    step_s = jti.dt_fs
    step_i = float(jti.grid_ti[1] - jti.grid_ti[0])
    if not math.isclose(step_s, step_i, rel_tol=1e-9):
        raise GridError("signal and idler time grids need equal spacing")
    return step_s


def antidiagonal_projection(jti: JointTemporal) -> Tuple[np.ndarray, np.ndarray]:
    """Distribution of the arrival-time difference t_s - t_i."""
    step = _common_step(jti)
    n_s, n_i = jti.intensity.shape
    offset = jti.grid_ts[0] - jti.grid_ti[0]
    index = np.subtract.outer(np.arange(n_s), np.arange(n_i)) + (n_i - 1)
    weights = np.bincount(index.ravel(), weights=jti.intensity.ravel(), minlength=n_s + n_i - 1)
    delays = offset + (np.arange(weights.size) - (n_i - 1)) * step
    return delays, weights


def entanglement_time(jti: JointTemporal) -> float:
    """FWHM in fs of the antidiagonal projection of the JTI."""
    if not jti.mass > 0:
        raise GridError("JTI has no mass")
    delays, weights = antidiagonal_projection(jti)
    return fwhm_of_profile(delays, weights)


def marginal_pulse_fwhm(jti: JointTemporal, axis: str = "s") -> float:
    """FWHM in fs of the signal ('s') or idler ('i') temporal marginal."""
    if axis not in ("s", "i"):
        raise DomainError(f"axis must be 's' or 'i', got {axis!r}")
    if not jti.mass > 0:
        raise GridError("JTI has no mass")
    if axis == "s":
        return fwhm_of_profile(jti.grid_ts, jti.intensity.sum(axis=1))
    return fwhm_of_profile(jti.grid_ti, jti.intensity.sum(axis=0))


def coincidence_ratio(jti_ref: JointTemporal, jti_disp: JointTemporal, delta_t: float) -> float:
    """
    Coincidences within |t_s - t_i| <= delta_t, reference over dispersed.

    Raises:
        GridError: If the two JTIs do not share grids
    """
    same_grid = (
        jti_ref.intensity.shape == jti_disp.intensity.shape
        and np.allclose(jti_ref.grid_ts, jti_disp.grid_ts)
        and np.allclose(jti_ref.grid_ti, jti_disp.grid_ti)
    )
    if not same_grid:
        raise GridError("coincidence ratio needs JTIs on identical grids")
    step = _common_step(jti_ref)
    if delta_t < step * (1.0 - 1e-9):
        raise DomainError(f"coincidence window {delta_t:g} fs is below the grid step {step:g} fs")
    delays, ref = antidiagonal_projection(jti_ref)
    _, disp = antidiagonal_projection(jti_disp)
    inside = np.abs(delays) <= delta_t * (1.0 + 1e-9)
    dispersed = float(disp[inside].sum())
    if dispersed <= 0:
        raise SingularityError("dispersed JTI has no coincidences in the window", factor="window")
    return float(ref[inside].sum()) / dispersed


def coincidence_ratio_curve(
    jti_ref: JointTemporal, jti_disp: JointTemporal, windows: Sequence[float]
) -> List[Tuple[float, float]]:
    return [(w, coincidence_ratio(jti_ref, jti_disp, w)) for w in windows]


def chirped_gaussian_widths(cov: np.ndarray, gdd_fs2: float) -> Dict[str, float]:
    """
    Closed-form temporal widths of a chirped Gaussian JSI.

    Args:
        cov: JSI covariance over (detuning_s, detuning_i) in (rad/fs)^2
        gdd_fs2: Quadratic phase per photon

    Returns:
        Entanglement time and both marginal FWHMs, in fs
    """
    kernel = 0.5 * np.linalg.inv(cov) - 1j * gdd_fs2 * np.eye(2)
    sigma_t = np.linalg.inv(2.0 * np.real(np.linalg.inv(kernel)))
    difference = np.array([1.0, -1.0])
    return {
        "entanglement_time_fs": FWHM_PER_SIGMA * math.sqrt(difference @ sigma_t @ difference),
        "marginal_s_fs": FWHM_PER_SIGMA * math.sqrt(sigma_t[0, 0]),
        "marginal_i_fs": FWHM_PER_SIGMA * math.sqrt(sigma_t[1, 1]),
    }


def synthetic_covariance(jsi: JointSpectrum) -> np.ndarray:
    """Empirical covariance of a JSI over the detunings; used for closed-form checks."""
    ws, wi = np.meshgrid(jsi.grid_s - jsi.pump_center, jsi.grid_i - jsi.pump_center, indexing="ij")
    weights = jsi.intensity / jsi.intensity.sum()
    mean_s, mean_i = np.sum(weights * ws), np.sum(weights * wi)
    ds, di = ws - mean_s, wi - mean_i
    return np.array(
        [
            [np.sum(weights * ds * ds), np.sum(weights * ds * di)],
            [np.sum(weights * ds * di), np.sum(weights * di * di)],
        ]
    )
