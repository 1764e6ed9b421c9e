"""
Photon Statistics Tools
Squeezed-vacuum photon-number distributions, click-detector response with
non-paralyzing dead time, and inversion from count rate to mean photon number.
"""

import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from scipy.optimize import brentq
from scipy.signal import fftconvolve
from scipy.special import gammaln

from ..models.apparatus import DetectorModel
from ..models.photon import MuChainResult, PhotonNumberDist, SourceKind
from ..utils.exceptions import (
    CutoffError,
    DomainError,
    SaturationError,
    SingularityError,
    UnreachableError,
)
from ..utils.units import FS_TO_S, gm_to_cgs

logger = structlog.get_logger("photon_stats")

TAIL_TOLERANCE = 1e-9
MU_BRACKET = (1e-6, 1e3)
_INITIAL_CUTOFF = 16
_MAX_CUTOFF = 1 << 22
_DIRECT_CONVOLVE_LIMIT = 512


def g2_of_source(source: Union[SourceKind, str], mu: Optional[float] = None) -> float:
    """
    Second-order coherence g2(0) of a light source.

    Args:
        source: coherent, thermal or smsv
        mu: Mean photons per pulse, required for smsv

    Returns:
        g2 (1 for coherent, 2 for thermal, 3 + 1/mu for squeezed vacuum)
    """
    kind = SourceKind(source)
    if kind == SourceKind.COHERENT:
        return 1.0
    if kind == SourceKind.THERMAL:
        return 2.0
    if mu is None or not mu > 0:
        raise DomainError(f"squeezed vacuum needs mu > 0, got {mu}")
    return 3.0 + 1.0 / mu


def tpa_rate(kappa2: float, mu: float, g2: float) -> float:
    """Two-photon absorption rate kappa2 * mu^2 * g2."""
    if kappa2 < 0 or mu < 0 or g2 < 0:
        raise DomainError("kappa2, mu and g2 must be non-negative")
    return kappa2 * mu**2 * g2


def smsv_tpa_rate(kappa2: float, mu: float) -> float:
    """Squeezed-vacuum rate kappa2 (mu + 3 mu^2); the linear term dominates at low mu."""
    if kappa2 < 0 or mu < 0:
        raise DomainError("kappa2 and mu must be non-negative")
    return kappa2 * (mu + 3.0 * mu**2)


def kappa2_from_sigma_c(sigma_c_gm: float, t_eff_fs: float, a_eff_cm2: float) -> float:
    """
    Per-pulse 2PA coupling from a classical cross-section.

    Args:
        sigma_c_gm: Cross-section in GM
        t_eff_fs: Effective pulse duration in fs
        a_eff_cm2: Effective beam area in cm^2

    Returns:
        kappa2 in s^-1
    """
    if t_eff_fs == 0 or a_eff_cm2 == 0:
        raise SingularityError("effective duration and area must be non-zero", factor="T*A")
    if sigma_c_gm <= 0 or t_eff_fs < 0 or a_eff_cm2 < 0:
        raise DomainError("sigma_C, T and A must be positive")
    t_s = t_eff_fs * FS_TO_S
    return gm_to_cgs(sigma_c_gm) / (2.0 * t_s**2 * a_eff_cm2**2)


def _smsv_probs(mu: float, n_max: int) -> np.ndarray:
    probs = np.zeros(n_max + 1)
    m = np.arange(n_max // 2 + 1)
    log_p = (
        m * math.log(mu)
        + gammaln(2 * m + 1)
        - 2 * m * math.log(2.0)
        - 2 * gammaln(m + 1)
        - (2 * m + 1) / 2.0 * math.log1p(mu)
    )
    probs[0::2] = np.exp(log_p)
    return probs


def _convolve(a: np.ndarray, b: np.ndarray, size: int) -> np.ndarray:
    if max(a.size, b.size) <= _DIRECT_CONVOLVE_LIMIT:
        out = np.convolve(a, b)
    else:
        out = np.clip(fftconvolve(a, b), 0.0, None)
    return out[:size]


def _convolution_power(probs: np.ndarray, times: int) -> np.ndarray:
    size = probs.size
    result = np.zeros(size)
    result[0] = 1.0
    base = probs
    while times:
        if times & 1:
            result = _convolve(result, base, size)
        times >>= 1
        if times:
            base = _convolve(base, base, size)
    return result


def _check_tail(probs: np.ndarray, n_max: int) -> None:
    tail = 1.0 - float(probs.sum())
    if tail >= TAIL_TOLERANCE:
        raise CutoffError(f"cutoff n_max={n_max} leaves tail mass {tail:.3g}", tail_mass=tail)


def smsv_distribution(mu: float, n_max: Optional[int] = None) -> PhotonNumberDist:
    """
    Photon-number distribution of a single-mode squeezed vacuum.

    Args:
        mu: Mean photons per pulse
        n_max: Even cutoff; chosen by doubling until the tail is below 1e-9 when omitted

    Returns:
        PhotonNumberDist with P(n) = 0 for odd n

    Raises:
        CutoffError: If a given cutoff leaves tail mass >= 1e-9
    """
    if not mu > 0:
        raise DomainError(f"mu must be positive, got {mu}")
    if n_max is not None:
        if n_max < 0 or n_max % 2:
            raise DomainError(f"n_max must be a non-negative even integer, got {n_max}")
        probs = _smsv_probs(mu, n_max)
        _check_tail(probs, n_max)
        return PhotonNumberDist(probs=probs, mu=mu, mode_count=1)

    cutoff = _INITIAL_CUTOFF
    while True:
        probs = _smsv_probs(mu, cutoff)
        if 1.0 - probs.sum() < TAIL_TOLERANCE:
            return PhotonNumberDist(probs=probs, mu=mu, mode_count=1)
        if cutoff >= _MAX_CUTOFF:
            _check_tail(probs, cutoff)
        cutoff *= 2


def multimode_distribution(
    mu_total: float, modes: int, n_max: Optional[int] = None
) -> PhotonNumberDist:
    """
    Total photon number of ``modes`` equally populated squeezed-vacuum modes.

    The result is the M-fold convolution of the single-mode distribution at
    mu_total / M, so the mean is preserved for every M.
    """
    if modes < 1:
        raise DomainError(f"mode count must be >= 1, got {modes}")
    if modes == 1:
        return smsv_distribution(mu_total, n_max)
    if not mu_total > 0:
        raise DomainError(f"mu must be positive, got {mu_total}")

    per_mode = mu_total / modes
    if n_max is not None:
        total = _convolution_power(_smsv_probs(per_mode, n_max - n_max % 2), modes)
        if total.size < n_max + 1:
            total = np.pad(total, (0, n_max + 1 - total.size))
        _check_tail(total, n_max)
        return PhotonNumberDist(probs=total, mu=mu_total, mode_count=modes)

    cutoff = _INITIAL_CUTOFF
    while True:
        total = _convolution_power(_smsv_probs(per_mode, cutoff), modes)
        if 1.0 - total.sum() < TAIL_TOLERANCE:
            return PhotonNumberDist(probs=total, mu=mu_total, mode_count=modes)
        if cutoff >= _MAX_CUTOFF:
            _check_tail(total, cutoff)
        cutoff *= 2


def click_probability(dist: PhotonNumberDist, eta: float) -> float:
    """Probability of at least one detection: sum_n [1 - (1-eta)^n] P(n)."""
    if not 0 <= eta <= 1:
        raise DomainError(f"efficiency must lie in [0, 1], got {eta}")
    n = np.arange(dist.probs.size)
    return float(np.dot(1.0 - np.power(1.0 - eta, n), dist.probs))


def click_probability_closed_form(mu_total: float, modes: int, eta: float) -> float:
    """Generating-function form of click_probability for multimode squeezed vacuum."""
    if not 0 <= eta <= 1:
        raise DomainError(f"efficiency must lie in [0, 1], got {eta}")
    if mu_total < 0 or modes < 1:
        raise DomainError("mu must be non-negative and modes >= 1")
    survive = (1.0 - eta) ** 2
    return 1.0 - (1.0 + mu_total / modes * (1.0 - survive)) ** (-modes / 2.0)


def dead_time_correct(p_meas: float, n_dead: int) -> float:
    """
    Undo a non-paralyzing dead time spanning ``n_dead`` pulses.

    Raises:
        SaturationError: If n_dead * p_meas >= 1
    """
    if not 0 <= p_meas < 1:
        raise DomainError(f"click probability must lie in [0, 1), got {p_meas}")
    if n_dead < 0:
        raise DomainError("n_dead must be non-negative")
    denominator = 1.0 - n_dead * p_meas
    if denominator <= 0:
        raise SaturationError(
            f"detector saturated: P_meas={p_meas:.4g} reaches the dead-time pole 1/N_dead "
            f"(N_dead={n_dead})"
        )
    return p_meas / denominator


def dead_time_apply(p_corr: float, n_dead: int) -> float:
    """Measured click probability for a true click probability; inverse of dead_time_correct."""
    if not 0 <= p_corr <= 1 or n_dead < 0:
        raise DomainError("p_corr must lie in [0, 1] and n_dead must be non-negative")
    return p_corr / (1.0 + n_dead * p_corr)


def invert_mu(p_click_corr: float, eta: float, modes: int = 1) -> float:
    """
    Mean photon number that produces a given (dead-time corrected) click probability.

    Args:
        p_click_corr: Click probability per pulse
        eta: System detection efficiency
        modes: Number of equally populated modes

    Returns:
        Mean photons per pulse, relative tolerance 1e-8

    Raises:
        UnreachableError: If the probability cannot be produced inside the search bracket
    """
    if not 0 < p_click_corr < 1:
        raise DomainError(f"click probability must lie in (0, 1), got {p_click_corr}")
    if not 0 < eta <= 1:
        raise DomainError(f"efficiency must lie in (0, 1], got {eta}")

    low, high = MU_BRACKET

    def residual(mu: float) -> float:
        return click_probability_closed_form(mu, modes, eta) - p_click_corr

    if residual(high) < 0:
        limit = click_probability_closed_form(high, modes, eta)
        raise UnreachableError(
            f"click probability {p_click_corr:.4g} exceeds {limit:.4g}, reached at mu={high:g}"
        )
    if residual(low) > 0:
        raise UnreachableError(f"click probability {p_click_corr:.4g} implies mu below {low:g}")

    mu = float(brentq(residual, low, high, xtol=1e-15, rtol=1e-12, maxiter=200))
    logger.info("photon_stats.invert_mu.solved", p_click=p_click_corr, eta=eta, modes=modes, mu=mu)
    return mu


def fit_mu_line(points: Sequence[Tuple[float, float]]) -> Tuple[float, float]:
    """Least-squares (slope, intercept) of mu against pump power."""
    if len(points) < 2:
        raise DomainError("need at least two (power, mu) points")
    powers = np.array([p for p, _ in points], dtype=float)
    mus = np.array([m for _, m in points], dtype=float)
    if np.unique(powers).size < 2:
        raise SingularityError("all calibration powers are identical", factor="power spread")
    slope, intercept = np.polyfit(powers, mus, 1)
    return float(slope), float(intercept)


def extrapolate_mu(points: Sequence[Tuple[float, float]], target_power: float) -> float:
    """Evaluate the (power, mu) calibration line at ``target_power``."""
    slope, intercept = fit_mu_line(points)
    mu = slope * target_power + intercept
    logger.info(
        "photon_stats.extrapolate_mu",
        points=len(points),
        slope=slope,
        intercept=intercept,
        target_power=target_power,
        mu=mu,
    )
    return mu


def mu_at_sample(mu_xtal: float, loss: float) -> float:
    """Photons per pulse that survive a fractional path loss."""
    if not 0 <= loss < 1:
        raise DomainError(f"loss must lie in [0, 1), got {loss}")
    return mu_xtal * (1.0 - loss)


def estimate_mode_count(spdc_bandwidth: float, laser_bandwidth: float) -> float:
    """Spectral mode count as the ratio of the pair bandwidth to the pump bandwidth."""
    if spdc_bandwidth <= 0 or laser_bandwidth <= 0:
        raise DomainError("bandwidths must be positive")
    return max(1.0, spdc_bandwidth / laser_bandwidth)


def photons_per_mode(mu: float, modes: float) -> float:
    if modes < 1:
        raise DomainError("modes must be >= 1")
    return mu / modes


def mu_chain(
    count_rate: float, eta: float, dead_time_ns: float, rep_rate_hz: float, modes: int = 1
) -> MuChainResult:
    """
    Count rate to mean photon number: Q_meas -> P_meas -> P_corr -> mu.

    Raises:
        SaturationError: If the rate reaches the dead-time pole
    """
    detector = DetectorModel(efficiency=eta, dead_time_ns=dead_time_ns, rep_rate_hz=rep_rate_hz)
    p_meas = count_rate / rep_rate_hz
    if not 0 <= p_meas < 1:
        raise SaturationError(
            f"count rate {count_rate:g} is not below the rep rate {rep_rate_hz:g}"
        )
    p_corr = dead_time_correct(p_meas, detector.n_dead)
    mu = invert_mu(p_corr, eta, modes)
    return MuChainResult(
        count_rate=count_rate,
        rep_rate_hz=rep_rate_hz,
        efficiency=eta,
        dead_time_ns=dead_time_ns,
        n_dead=detector.n_dead,
        mode_count=modes,
        p_meas=p_meas,
        p_corr=p_corr,
        mu=mu,
    )
