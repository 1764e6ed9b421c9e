"""
Measurement Statistics Tools
Chopper background subtraction, power-law fitting, error-bar policy, Allan
deviation and first-order uncertainty propagation.
"""

from collections import OrderedDict
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
import structlog
from scipy.optimize import curve_fit

from ..models.series import ChopperPhase, CountSeries, PowerLawFit, RatePoint
from ..models.uncertainty import UncertainValue
from ..utils.exceptions import DomainError, SingularityError

logger = structlog.get_logger("stats")

# rate thresholds for relabelling ambiguous bins, as fractions of (open - closed)
TRANSITION_BAND = (0.2, 0.8)

PointLike = Union[RatePoint, Tuple[float, float, float]]


def propagate(
    terms: Sequence[Tuple[UncertainValue, float]], coverage_k: float = 2.0
) -> UncertainValue:
    """
    Product of powers with linearized relative-uncertainty propagation.

    Args:
        terms: (value, power) pairs; only the standard uncertainties are used
        coverage_k: Coverage factor attached to the result

    Returns:
        UncertainValue of prod(v_i ** p_i)

    Raises:
        DomainError: If a zero value carries a negative power
    """
    value = 1.0
    rel_var = 0.0
    for term, power in terms:
        if term.value == 0:
            if power < 0:
                raise DomainError("zero value raised to a negative power")
            value = 0.0
            continue
        if term.value < 0 and power != int(power):
            raise DomainError("negative value raised to a fractional power")
        value *= term.value**power
        rel_var += (power * term.std_uncertainty / term.value) ** 2
    return UncertainValue(
        value=float(value),
        std_uncertainty=float(abs(value) * np.sqrt(rel_var)),
        coverage_k=coverage_k,
    )


def classify_unknown_bins(series: CountSeries) -> CountSeries:
    """
    Label ``unknown`` bins by their rate relative to the open and closed phases.

    Bins between 20% and 80% of the way from the closed-phase mean to the
    open-phase mean become transition bins.
    """
    unknown = series.mask(ChopperPhase.UNKNOWN)
    if not unknown.any():
        return series
    rates = series.counts / series.bin_widths
    signal = series.mask(ChopperPhase.SIGNAL)
    background = series.mask(ChopperPhase.BACKGROUND)
    if signal.any() and background.any():
        high, low = rates[signal].mean(), rates[background].mean()
    else:
        high, low = np.percentile(rates, 90), np.percentile(rates, 10)
    span = high - low
    phases = list(series.phases)
    for index in np.flatnonzero(unknown):
        fraction = (rates[index] - low) / span if span > 0 else 0.5
        if fraction >= TRANSITION_BAND[1]:
            phases[index] = ChopperPhase.SIGNAL
        elif fraction <= TRANSITION_BAND[0]:
            phases[index] = ChopperPhase.BACKGROUND
        else:
            phases[index] = ChopperPhase.TRANSITION
    logger.debug("stats.classify_unknown_bins", relabelled=int(unknown.sum()))
    return series.with_phases(tuple(phases))


def _phase_totals(series: CountSeries) -> Tuple[int, float, int, float]:
    series = classify_unknown_bins(series)
    signal = series.mask(ChopperPhase.SIGNAL)
    background = series.mask(ChopperPhase.BACKGROUND)
    if not signal.any() or not background.any():
        raise DomainError(
            f"series {series.label!r} needs both signal and background bins "
            f"(signal={int(signal.sum())}, background={int(background.sum())})"
        )
    widths = series.bin_widths
    return (
        int(series.counts[signal].sum()),
        float(widths[signal].sum()),
        int(series.counts[background].sum()),
        float(widths[background].sum()),
    )


def background_subtract(
    series: CountSeries, transition_fraction: float = 0.05
) -> Tuple[float, float]:
    """
    Chopper-referenced background subtraction.

    Args:
        series: Labelled count bins; transition bins are discarded
        transition_fraction: Expected share of transition bins; a larger observed
            share is logged as a warning

    Returns:
        (rate, poisson_sigma) in counts s^-1

    Raises:
        DomainError: If the series lacks a signal or a background phase
    """
    s_counts, t_signal, b_counts, t_background = _phase_totals(series)
    rate = s_counts / t_signal - b_counts / t_background
    sigma = float(np.sqrt(s_counts / t_signal**2 + b_counts / t_background**2))

    transition_share = 1.0 - (t_signal + t_background) / series.duration_s
    if transition_share > 2.0 * transition_fraction + 1e-12:
        logger.warning(
            "stats.background_subtract.excess_transition",
            label=series.label,
            observed=transition_share,
            expected=transition_fraction,
        )
    return float(rate), sigma


def error_bar(
    measurements: Sequence[float], total_counts: int, live_time: float, k: float = 2.0
) -> float:
    """
    Larger of the repeat scatter and the Poisson error, times the coverage factor.

    Args:
        measurements: Repeat rate measurements in counts s^-1
        total_counts: Counts behind the measurements
        live_time: Live time in s behind total_counts
        k: Coverage factor

    Returns:
        Expanded error bar in counts s^-1
    """
    if len(measurements) < 1:
        raise DomainError("error_bar needs at least one measurement")
    if live_time <= 0:
        raise DomainError("live time must be positive")
    scatter = float(np.std(measurements, ddof=1)) if len(measurements) > 1 else 0.0
    poisson = float(np.sqrt(total_counts)) / live_time
    return k * max(scatter, poisson)


def group_by_power(
    series_list: Sequence[CountSeries], transition_fraction: float = 0.05
) -> List[RatePoint]:
    """Collapse repeat series into one (power, rate, sigma) point per power."""
    groups: Dict[float, List[CountSeries]] = OrderedDict()
    for series in series_list:
        if series.power_uw is None:
            raise DomainError(f"series {series.label!r} carries no power")
        groups.setdefault(series.power_uw, []).append(series)

    points = []
    for power, members in sorted(groups.items()):
        rates = [background_subtract(s, transition_fraction)[0] for s in members]
        totals = [_phase_totals(s) for s in members]
        s_counts = sum(t[0] for t in totals)
        t_signal = sum(t[1] for t in totals)
        b_counts = sum(t[2] for t in totals)
        t_background = sum(t[3] for t in totals)
        pooled = s_counts / t_signal - b_counts / t_background
        sigma = error_bar(rates, s_counts + b_counts, t_signal, k=1.0)
        points.append(RatePoint(power_uw=power, rate_cps=pooled, sigma_cps=sigma))
    return points


def _as_points(points: Sequence[PointLike]) -> List[RatePoint]:
    return [
        p if isinstance(p, RatePoint) else RatePoint(power_uw=p[0], rate_cps=p[1], sigma_cps=p[2])
        for p in points
    ]


def _log_line(log_w: np.ndarray, log_a: float, b: float) -> np.ndarray:
    return log_a + b * log_w


def fit_power_law(points: Sequence[PointLike]) -> PowerLawFit:
    """
    Weighted least-squares fit of rate = a W^b in log-log space.

    Args:
        points: (power_uw, rate, sigma) triples or RatePoints

    Returns:
        PowerLawFit with covariance of (a, b); ``accepted`` when 1.95 <= b <= 2.05

    Raises:
        DomainError: If fewer than three points have a positive rate
        SingularityError: If the usable points share a single power
    """
    all_points = _as_points(points)
    usable = [p for p in all_points if p.rate_cps > 0 and p.power_uw > 0]
    excluded = len(all_points) - len(usable)
    if excluded:
        logger.warning(
            "stats.fit_power_law.points_excluded",
            excluded=excluded,
            powers=[p.power_uw for p in all_points if p not in usable],
        )
    if len(usable) < 3:
        raise DomainError(f"power-law fit needs >= 3 positive rates, got {len(usable)}")

    log_w = np.log([p.power_uw for p in usable])
    rates = np.array([p.rate_cps for p in usable])
    log_rate = np.log(rates)
    if np.unique(log_w).size < 2:
        raise SingularityError("all fit points share one power", factor="power spread")

    sigmas = np.array([p.sigma_cps for p in usable])
    weighted = bool(np.all(sigmas > 0))
    log_sigma = sigmas / rates if weighted else None
    params, cov = curve_fit(
        _log_line,
        log_w,
        log_rate,
        p0=(float(log_rate.mean() - 2.0 * log_w.mean()), 2.0),
        sigma=log_sigma,
        absolute_sigma=weighted,
    )
    log_a, b = params
    amplitude = float(np.exp(log_a))
    jacobian = np.array([[amplitude, 0.0], [0.0, 1.0]])
    cov_ab = jacobian @ cov @ jacobian.T
    cov_ab = 0.5 * (cov_ab + cov_ab.T)
    scale = log_sigma if log_sigma is not None else np.ones_like(log_rate)
    residuals = (log_rate - _log_line(log_w, log_a, b)) / scale

    fit = PowerLawFit(
        amplitude=amplitude,
        exponent=float(b),
        covariance=cov_ab,
        residuals=residuals,
        n_points=len(usable),
        n_excluded=excluded,
    )
    logger.info(
        "stats.fit_power_law.done",
        amplitude=fit.amplitude,
        exponent=fit.exponent,
        exponent_sigma=fit.exponent_sigma,
        accepted=fit.accepted,
        weighted=weighted,
    )
    return fit


def quadratic_slope(points: Sequence[PointLike], coverage_k: float = 2.0) -> UncertainValue:
    """
    Slope s of rate = s W^2 by weighted least squares with the exponent fixed at 2.

    Returns:
        UncertainValue in counts s^-1 uW^-2
    """
    usable = [p for p in _as_points(points) if p.power_uw > 0]
    if not usable:
        raise DomainError("quadratic slope needs at least one non-zero power")
    w2 = np.array([p.power_uw for p in usable]) ** 2
    rates = np.array([p.rate_cps for p in usable])
    sigmas = np.array([p.sigma_cps for p in usable])
    if np.all(sigmas > 0):
        weights = 1.0 / sigmas**2
        denominator = float(np.sum(weights * w2**2))
        slope = float(np.sum(weights * rates * w2)) / denominator
        std = float(np.sqrt(1.0 / denominator))
    else:
        denominator = float(np.sum(w2**2))
        slope = float(np.sum(rates * w2)) / denominator
        dof = max(1, len(usable) - 1)
        std = float(np.sqrt(np.sum((rates - slope * w2) ** 2) / dof / denominator))
    return UncertainValue(value=slope, std_uncertainty=std, coverage_k=coverage_k)


def allan_deviation(
    rates: Sequence[float], sample_interval_s: float, taus: Sequence[float]
) -> List[Tuple[float, float]]:
    """
    Non-overlapping Allan deviation of an evenly sampled rate record.

    Args:
        rates: Rate samples
        sample_interval_s: Spacing of the samples in s
        taus: Averaging times in s; each is rounded to a whole number of samples

    Returns:
        (tau, deviation) pairs; taus longer than half the record are dropped with a warning
    """
    y = np.asarray(rates, dtype=float)
    if sample_interval_s <= 0:
        raise DomainError("sample interval must be positive")
    result = []
    for tau in taus:
        m = max(1, int(round(tau / sample_interval_s)))
        clusters = y.size // m
        if clusters < 2:
            logger.warning(
                "stats.allan_deviation.tau_dropped", tau=tau, record_s=y.size * sample_interval_s
            )
            continue
        means = y[: clusters * m].reshape(clusters, m).mean(axis=1)
        deviation = float(np.sqrt(0.5 * np.mean(np.diff(means) ** 2)))
        result.append((m * sample_interval_s, deviation))
    return result


def optimal_integration_time(points: Sequence[Tuple[float, float]]) -> float:
    """Averaging time at the Allan-deviation minimum."""
    if not points:
        raise DomainError("no Allan points")
    tau, _ = min(points, key=lambda p: p[1])
    return tau


def combine_blocks(rates: Sequence[float], sigmas: Sequence[float]) -> Tuple[float, float]:
    """Inverse-variance weighted mean of block rates and its standard error."""
    r = np.asarray(rates, dtype=float)
    s = np.asarray(sigmas, dtype=float)
    if r.size == 0 or r.size != s.size:
        raise DomainError("rates and sigmas must be non-empty and of equal length")
    if np.any(s <= 0):
        raise SingularityError("block sigma must be positive", factor="sigma")
    weights = 1.0 / s**2
    return float(np.sum(weights * r) / np.sum(weights)), float(np.sqrt(1.0 / np.sum(weights)))


def fluorescence_lower_bound(sigma: float, k: float = 2.0) -> float:
    """Smallest rate distinguishable from zero: k sigma."""
    if sigma < 0:
        raise DomainError("sigma must be non-negative")
    return k * sigma
