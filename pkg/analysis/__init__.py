"""Multifractal and statistical analysis of simulated and market series."""

from analysis.density import fit_power_law, log_histogram
from analysis.holder import (
    coarse_exponents,
    kinetic_spectrum,
    large_deviation_spectrum,
    normalize_unit_range,
    spectrum_peak,
    super_unit_support,
)
from analysis.series import devils_staircase, integrate_returns, summary_stats

__all__ = [
    "coarse_exponents",
    "devils_staircase",
    "fit_power_law",
    "integrate_returns",
    "kinetic_spectrum",
    "large_deviation_spectrum",
    "log_histogram",
    "normalize_unit_range",
    "spectrum_peak",
    "summary_stats",
    "super_unit_support",
]
