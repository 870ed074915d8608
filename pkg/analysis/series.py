"""Return integration, intrinsic-time staircase and turbulence statistics."""

import math

import numpy as np
from scipy.stats import kurtosis, skew

from exceptions import DomainError, InputError
from models import SummaryStats


def _finite(series, what: str) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    bad = np.flatnonzero(~np.isfinite(x))
    if bad.size:
        raise InputError(f"non-finite {what} at index {bad[0]}")
    return x


def integrate_returns(returns, s0: float) -> np.ndarray:
    """Log-price path ln(s0) + cumulative returns, one longer than the input."""
    if not s0 > 0:
        raise DomainError("s0", f"must be > 0 (got {s0})")
    r = _finite(returns, "return")
    start = math.log(s0)
    return np.concatenate(([start], start + np.cumsum(r)))


def devils_staircase(tau_series) -> np.ndarray:
    """Cumulative intrinsic time, sum of tau_B up to each round."""
    tau = _finite(tau_series, "intrinsic time")
    negative = np.flatnonzero(tau < 0)
    if negative.size:
        raise InputError(f"negative intrinsic time at index {negative[0]}")
    return np.cumsum(tau)


def summary_stats(series, max_lag: int) -> SummaryStats:
    """Moments plus autocorrelation of absolute deviations at lags 1..max_lag."""
    x = _finite(series, "value")
    if max_lag < 1:
        raise InputError(f"max_lag must be >= 1 (got {max_lag})")
    if x.size <= max_lag:
        raise InputError(f"series of length {x.size} is too short for max_lag {max_lag}")

    mean = float(x.mean())
    if np.ptp(x) == 0:
        return SummaryStats(n=x.size, mean=mean, std=0.0, skewness=None, excess_kurtosis=None, acf_abs=None)

    a = np.abs(x - mean)
    c = a - a.mean()
    denom = float(c @ c)
    acf = None
    if denom > 0:
        acf = tuple(float(np.clip(c[:-lag] @ c[lag:] / denom, -1.0, 1.0)) for lag in range(1, max_lag + 1))

    return SummaryStats(
        n=x.size,
        mean=mean,
        std=float(x.std()),
        skewness=float(skew(x)),
        excess_kurtosis=float(kurtosis(x, fisher=True, bias=True)),
        acf_abs=acf,
    )
