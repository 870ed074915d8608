"""Coarse Hoelder exponents and the kernel large-deviation spectrum.

A signal of N samples is read as a graph over [0, 1) with spacing 1/N. At
box size n the unit interval splits into closed boxes [j*delta, (j+1)*delta]
with delta = n/N; each box holds n + 1 samples, sharing its endpoints with
its neighbours. The coarse exponent of a box is log(osc) / log(delta) with
osc = max - min over the box.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple, Optional, Sequence

import numpy as np

from config import DEFAULT_ALPHA_STEP, DEFAULT_KINETIC_BANDWIDTH, DEFAULT_MIN_BOXES, DEFAULT_RESOLUTIONS
from exceptions import AnalysisError, DomainError, InputError
from models import ResolutionCurve, Spectrum

logger = logging.getLogger(__name__)

GRID_PAD = 4.0  # bandwidths of padding around the observed exponents


class CoarseGrain(NamedTuple):
    box_size: int
    box_count: int
    delta: float
    exponents: np.ndarray
    dropped: int


def _as_signal(signal) -> np.ndarray:
    x = np.asarray(signal, dtype=float)
    bad = np.flatnonzero(~np.isfinite(x))
    if bad.size:
        raise InputError(f"non-finite signal value at index {bad[0]}")
    return x


def normalize_unit_range(signal) -> np.ndarray:
    """Rescale to [0, 1]. A constant signal maps to zeros."""
    x = _as_signal(signal)
    if x.size == 0:
        return x
    span = x.max() - x.min()
    if span == 0:
        return np.zeros_like(x)
    return (x - x.min()) / span


def coarse_exponents(signal, box_size: int) -> CoarseGrain:
    """Per-box coarse Hoelder exponents at one box size.

    Boxes with zero oscillation are excluded and counted in ``dropped``.
    """
    x = _as_signal(signal)
    if box_size < 2:
        raise DomainError("box_size", f"must be >= 2 (got {box_size})")
    n_samples = x.size
    if n_samples < 2 * box_size:
        raise DomainError("box_size", f"signal of {n_samples} samples is shorter than two boxes of {box_size}")

    count = (n_samples - 1) // box_size
    starts = np.arange(count) * box_size
    windows = x[starts[:, None] + np.arange(box_size + 1)]
    osc = windows.max(axis=1) - windows.min(axis=1)

    delta = box_size / n_samples
    valid = osc > 0
    exponents = np.log(osc[valid]) / math.log(delta)
    return CoarseGrain(box_size, count, delta, exponents, int(count - valid.sum()))


def default_bandwidth(exponents: np.ndarray, floor: float) -> float:
    """Normal-reference rule 1.06 * std * n^(-1/5), floored for single-exponent signals."""
    h = 1.06 * float(np.std(exponents)) * exponents.size ** (-0.2)
    return max(h, floor)


def _kernel_density(grid: np.ndarray, samples: np.ndarray, bandwidth: float) -> np.ndarray:
    z = (grid[:, None] - samples[None, :]) / bandwidth
    return np.exp(-0.5 * z**2).sum(axis=1) / (samples.size * bandwidth * math.sqrt(2.0 * math.pi))


def _spectrum_curve(grain: CoarseGrain, grid: np.ndarray, bandwidth: float) -> ResolutionCurve:
    density = _kernel_density(grid, grain.exponents, bandwidth)
    support = density > 0
    f = 1.0 + np.log(density[support]) / math.log(1.0 / grain.delta)
    logger.debug(f"Resolution {grain.box_count} boxes: {grain.exponents.size} exponents, h={bandwidth:.4g}")
    return ResolutionCurve(
        box_size=grain.box_size,
        box_count=grain.box_count,
        delta=grain.delta,
        exponents=grain.exponents,
        alpha=grid[support],
        f=f,
        bandwidth=bandwidth,
        dropped_boxes=grain.dropped,
    )


def _alpha_grid(grains: Sequence[CoarseGrain], bandwidths: Sequence[float], step: float) -> np.ndarray:
    pooled = np.concatenate([g.exponents for g in grains])
    pad = GRID_PAD * max(bandwidths)
    lo = math.floor((pooled.min() - pad) / step)
    hi = math.ceil((pooled.max() + pad) / step)
    return np.arange(lo, hi + 1) * step


def large_deviation_spectrum(
    signal,
    resolutions: Sequence[int] = DEFAULT_RESOLUTIONS,
    alpha_grid: Optional[np.ndarray] = None,
    bandwidth: Optional[float] = None,
    alpha_step: float = DEFAULT_ALPHA_STEP,
    min_boxes: int = DEFAULT_MIN_BOXES,
    normalize: bool = True,
    workers: int = 1,
) -> Spectrum:
    """Kernel estimate of f(alpha) = 1 + log p(alpha) / log(1/delta) per resolution.

    Resolutions that do not fit the signal or leave fewer than ``min_boxes``
    valid boxes are skipped. Curves are ordered coarse to fine and the peak
    is read from the finest one.
    """
    x = normalize_unit_range(signal) if normalize else _as_signal(signal)

    grains = []
    for box_size in sorted(set(resolutions), reverse=True):
        if box_size < 2 or x.size < 2 * box_size:
            logger.warning(f"Skipping box size {box_size}: signal has {x.size} samples")
            continue
        grain = coarse_exponents(x, box_size)
        if grain.exponents.size < min_boxes:
            logger.warning(
                f"Skipping box size {box_size}: {grain.exponents.size} valid boxes "
                f"({grain.dropped} dropped), need {min_boxes}"
            )
            continue
        grains.append(grain)
    if not grains:
        raise AnalysisError("no valid boxes")

    bandwidths = [bandwidth if bandwidth is not None else default_bandwidth(g.exponents, alpha_step) for g in grains]
    grid = np.asarray(alpha_grid, dtype=float) if alpha_grid is not None else _alpha_grid(grains, bandwidths, alpha_step)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            curves = tuple(pool.map(_spectrum_curve, grains, [grid] * len(grains), bandwidths))
    else:
        curves = tuple(_spectrum_curve(g, grid, h) for g, h in zip(grains, bandwidths))

    peak_alpha, peak_f = _curve_peak(curves[-1])
    logger.info(f"Spectrum over {len(curves)} resolutions: peak alpha={peak_alpha:.4f} f={peak_f:.4f}")
    return Spectrum(curves=curves, peak_alpha=peak_alpha, peak_f=peak_f)


def kinetic_spectrum(
    k,
    resolutions: Sequence[int] = DEFAULT_RESOLUTIONS,
    bandwidth: Optional[float] = None,
    alpha_step: float = DEFAULT_ALPHA_STEP,
    min_boxes: int = DEFAULT_MIN_BOXES,
    workers: int = 1,
) -> Spectrum:
    """Spectrum of kinetic volatility levels on their own scale.

    K is dimensionless and bounded by 1, so no unit-range rescale is applied
    and the peak does not follow the largest spike of the sample. The kernel
    width defaults to ``DEFAULT_KINETIC_BANDWIDTH``, not the normal-reference
    rule.
    """
    x = _as_signal(k)
    bad = np.flatnonzero(x <= 0)
    if bad.size:
        raise InputError(f"non-positive K value at index {bad[0]}")
    return large_deviation_spectrum(
        x,
        resolutions=resolutions,
        bandwidth=DEFAULT_KINETIC_BANDWIDTH if bandwidth is None else bandwidth,
        alpha_step=alpha_step,
        min_boxes=min_boxes,
        normalize=False,
        workers=workers,
    )


def _curve_peak(curve: ResolutionCurve):
    if curve.alpha.size == 0:
        raise AnalysisError("empty spectrum")
    order = np.argsort(curve.alpha, kind="stable")
    best = order[np.argmax(curve.f[order])]
    return float(curve.alpha[best]), float(curve.f[best])


def spectrum_peak(spectrum: Spectrum):
    """(alpha*, f*) on the finest curve; ties go to the smaller alpha."""
    if not spectrum.curves:
        raise AnalysisError("empty spectrum")
    return _curve_peak(spectrum.finest)


def super_unit_support(spectrum: Spectrum) -> bool:
    """True when some box of the finest curve has alpha > 1 with f >= 0 there.

    Kernel tails alone put grid points above 1 for signals whose exponents
    all sit at or below 1; those do not count.
    """
    curve = spectrum.finest
    above = curve.exponents[curve.exponents > 1.0]
    if above.size == 0 or curve.alpha.size == 0:
        return False
    return bool(np.any(np.interp(above, curve.alpha, curve.f) >= 0.0))
