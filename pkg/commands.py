"""Experiment pipelines behind the CLI subcommands.

Each ``cmd_*`` reads its inputs, runs the library, writes its outputs into
the configured directory and returns a small summary dict for printing.
"""

import logging
from typing import Dict, Optional

import numpy as np
import pandas as pd

import output
from analysis import (
    devils_staircase,
    fit_power_law,
    integrate_returns,
    kinetic_spectrum,
    large_deviation_spectrum,
    log_histogram,
    summary_stats,
    super_unit_support,
)
from config import DEFAULT_DATE_COLUMN, DEFAULT_VALUE_COLUMN, analysis_settings, game_params
from dynamics import simulate
from exceptions import DomainError, InputError
from ingest import read_csv_file, to_signal
from models import AnalysisSettings, RunConfig

logger = logging.getLogger(__name__)

SIGNAL_TRANSFORMS = ("integrate", "levels", "kinetic", "log_returns")


def _read_frame(path: str) -> pd.DataFrame:
    try:
        return pd.read_csv(path)
    except FileNotFoundError as e:
        raise InputError(f"cannot read {path}: file not found") from e
    except pd.errors.EmptyDataError as e:
        raise InputError(f"{path} is empty") from e
    except (OSError, UnicodeDecodeError, pd.errors.ParserError) as e:
        raise InputError(f"cannot read {path}: {e}") from e


def _column(frame: pd.DataFrame, column: str, path: str) -> np.ndarray:
    if column not in frame.columns:
        raise InputError(f"column {column!r} not found in {path}")
    values = pd.to_numeric(frame[column], errors="coerce")
    bad = np.flatnonzero(values.isna().to_numpy())
    if bad.size:
        raise InputError(f"column {column!r} in {path} has a non-numeric value at row {bad[0] + 1}")
    return values.to_numpy(dtype=float)


def _read_column(path: str, column: str) -> np.ndarray:
    """Load one numeric column from a CSV file."""
    return _column(_read_frame(path), column, path)


def _prepare_signal(values: np.ndarray, transform: str, s0: float) -> np.ndarray:
    if transform == "integrate":
        return integrate_returns(values, s0)
    if transform in ("levels", "kinetic"):
        return values
    if transform == "log_returns":
        if values.size < 2 or np.any(values <= 0):
            raise InputError("log_returns needs at least two positive values")
        return np.diff(np.log(values))
    raise DomainError("transform", f"must be one of {', '.join(SIGNAL_TRANSFORMS)} (got {transform!r})")


def _spectrum(signal: np.ndarray, settings: AnalysisSettings, transform: str = "levels"):
    if transform == "kinetic":
        return kinetic_spectrum(
            signal,
            resolutions=settings.resolutions,
            bandwidth=settings.bandwidth,
            alpha_step=settings.alpha_step,
            min_boxes=settings.min_boxes,
            workers=settings.workers,
        )
    return large_deviation_spectrum(
        signal,
        resolutions=settings.resolutions,
        bandwidth=settings.bandwidth,
        alpha_step=settings.alpha_step,
        min_boxes=settings.min_boxes,
        normalize=settings.normalize,
        workers=settings.workers,
    )


def cmd_simulate(cfg: RunConfig) -> Dict:
    """Simulate a trajectory and write it with its metadata."""
    params = game_params(cfg)
    trajectory = simulate(params)
    table = output.write_table(cfg.out_dir, "trajectory", output.trajectory_frame(trajectory), cfg.fmt)
    meta = output.write_json(cfg.out_dir, "trajectory_meta", output.trajectory_metadata(trajectory))
    return {"rounds_kept": len(trajectory), "seed": params.seed, "trajectory": table, "metadata": meta}


def cmd_spectrum(cfg: RunConfig, input_path: str, column: str, transform: str = "integrate") -> Dict:
    """Large-deviation spectrum of one column, integrated, as levels or as native-scale K."""
    settings = analysis_settings(cfg)
    signal = _prepare_signal(_read_column(input_path, column), transform, cfg["s0"])
    spectrum = _spectrum(signal, settings, transform)
    table = output.write_table(cfg.out_dir, "spectrum", output.spectrum_frame(spectrum), cfg.fmt)
    summary = output.peak_summary(spectrum)
    output.write_json(cfg.out_dir, "spectrum_peak", summary)
    return {**summary, "spectrum": table}


def cmd_density(cfg: RunConfig, input_path: str, column: str) -> Dict:
    """Log-binned histogram and power-law fit of a positive column."""
    settings = analysis_settings(cfg)
    hist = log_histogram(_read_column(input_path, column), settings.bins)
    fit = fit_power_law(hist)
    table = output.write_table(cfg.out_dir, "histogram", output.histogram_frame(hist), cfg.fmt)
    document = {"slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared, "bin_count": fit.bin_count}
    output.write_json(cfg.out_dir, "power_law_fit", document)
    return {**document, "histogram": table}


def cmd_staircase(cfg: RunConfig, input_path: str) -> Dict:
    """Cumulative intrinsic time from a trajectory's tau_B column."""
    frame = _read_frame(input_path)
    tau = _column(frame, "tau_B", input_path)
    if tau.size == 0:
        raise InputError(f"{input_path} has no rounds")
    rounds = _column(frame, "round", input_path).astype(int) if "round" in frame.columns else np.arange(tau.size)
    staircase = devils_staircase(tau)
    table = output.write_table(
        cfg.out_dir, "staircase", pd.DataFrame({"round": rounds, "theta_cumulative": staircase}), cfg.fmt
    )
    return {"rounds": int(tau.size), "total_intrinsic_time": float(staircase[-1]), "staircase": table}


def cmd_stats(cfg: RunConfig, input_path: str, column: str) -> Dict:
    """Moments and absolute-deviation autocorrelation of one column."""
    settings = analysis_settings(cfg)
    stats = summary_stats(_read_column(input_path, column), settings.max_lag)
    document = {
        "n": stats.n,
        "mean": stats.mean,
        "std": stats.std,
        "skewness": stats.skewness,
        "excess_kurtosis": stats.excess_kurtosis,
        "acf_abs": stats.acf_abs,
    }
    output.write_json(cfg.out_dir, "stats", document)
    return document


def cmd_compare(
    cfg: RunConfig,
    sim_path: str,
    sim_column: str,
    market_path: str,
    date_column: str = DEFAULT_DATE_COLUMN,
    value_column: str = DEFAULT_VALUE_COLUMN,
    market_transform: str = "levels",
    sim_transform: str = "levels",
    date_format: Optional[str] = None,
) -> Dict:
    """Spectra of a simulated column and a market series under identical settings."""
    settings = analysis_settings(cfg)
    logger.info("=" * 60)
    logger.info(f"Comparing {sim_path}:{sim_column} with {market_path}:{value_column}")
    logger.info("=" * 60)

    sim_signal = _prepare_signal(_read_column(sim_path, sim_column), sim_transform, cfg["s0"])
    sim_spectrum = _spectrum(sim_signal, settings, sim_transform)

    series, report = read_csv_file(
        market_path, date_column=date_column, value_column=value_column, date_format=date_format
    )
    market_spectrum = _spectrum(to_signal(series, market_transform), settings)

    document = {
        "sim": {**output.peak_summary(sim_spectrum), "super_unit_support": super_unit_support(sim_spectrum)},
        "market": {
            **output.peak_summary(market_spectrum),
            "super_unit_support": super_unit_support(market_spectrum),
            "rows_read": report.rows_read,
            "rows_kept": report.rows_kept,
        },
        "peak_delta": market_spectrum.peak_alpha - sim_spectrum.peak_alpha,
        "market_alpha_above_one": super_unit_support(market_spectrum),
    }
    output.write_json(cfg.out_dir, "comparison", document)
    return document
