"""Log-binned histograms and power-law fits for the stationary K density."""

import logging

import numpy as np
from scipy.stats import linregress

from exceptions import AnalysisError, DomainError, InputError
from models import Histogram, PowerLawFit

logger = logging.getLogger(__name__)

MIN_BINS = 8
DEGENERATE_SPAN = 1e-9


def log_histogram(samples, bin_count: int) -> Histogram:
    """Density histogram on logarithmically spaced bins spanning [min, max]."""
    x = np.asarray(samples, dtype=float)
    if bin_count < MIN_BINS:
        raise DomainError("bin_count", f"must be >= {MIN_BINS} (got {bin_count})")
    if x.size == 0:
        raise InputError("no samples")
    bad = np.flatnonzero(~(np.isfinite(x) & (x > 0)))
    if bad.size:
        raise InputError(f"sample at index {bad[0]} is not a positive finite number ({x[bad[0]]})")

    lo, hi = x.min(), x.max()
    if hi == lo:
        lo, hi = lo * (1.0 - DEGENERATE_SPAN), hi * (1.0 + DEGENERATE_SPAN)
    edges = np.geomspace(lo, hi, bin_count + 1)
    edges[0], edges[-1] = lo, hi
    counts, _ = np.histogram(x, bins=edges)
    widths = np.diff(edges)
    return Histogram(
        edges=edges,
        centers=np.sqrt(edges[:-1] * edges[1:]),
        counts=counts,
        density=counts / (x.size * widths),
    )


def fit_power_law(hist: Histogram) -> PowerLawFit:
    """Least-squares line through (log center, log density) over nonempty bins."""
    nonempty = hist.counts > 0
    used = int(nonempty.sum())
    if used < MIN_BINS:
        raise AnalysisError(f"power-law fit needs >= {MIN_BINS} nonempty bins, got {used}")

    fit = linregress(np.log(hist.centers[nonempty]), np.log(hist.density[nonempty]))
    r_squared = min(max(float(fit.rvalue) ** 2, 0.0), 1.0)
    logger.info(f"Power-law fit over {used} bins: slope={fit.slope:.4f} r2={r_squared:.4f}")
    return PowerLawFit(slope=float(fit.slope), intercept=float(fit.intercept), r_squared=r_squared, bin_count=used)
