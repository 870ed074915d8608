"""Global configuration for the quantum market game simulator.

Every key can come from a flag, a flat ``key = value`` config file, or the
default below, in that order of precedence.
"""

import logging
import os
from typing import Callable, Dict, NamedTuple, Optional

from exceptions import ConfigError
from models import AnalysisSettings, GameParams, RunConfig

logger = logging.getLogger(__name__)

BASE_DIR = os.path.dirname(os.path.abspath(__file__))
REFERENCE_CONFIG = os.path.join(BASE_DIR, "configs", "reference.conf")

REQUIRED = object()

# Run controls
DEFAULT_SEED = 0
DEFAULT_ROUNDS = 30000
DEFAULT_TRANSIENT = 10000
DEFAULT_S0 = 1.0

# Oscillator constants with no reference value
DEFAULT_B = 1.0
DEFAULT_HBAR_S = 1.0
DEFAULT_LADDER_DEPTH = 2  # levels enumerated per round for the equilibrium check

# Spectrum estimator
DEFAULT_RESOLUTIONS = (32, 64, 128, 256)
DEFAULT_ALPHA_STEP = 0.005
DEFAULT_MIN_BOXES = 50
DEFAULT_KINETIC_BANDWIDTH = 0.1  # kernel width for K levels on their own scale

# Density fit / statistics
DEFAULT_BINS = 16
DEFAULT_MAX_LAG = 20

# Market CSV schema
DEFAULT_DATE_COLUMN = "Date"
DEFAULT_VALUE_COLUMN = "Close"


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_i0(text: str) -> Optional[float]:
    if text.strip().lower() == "random":
        return None
    return float(text)


def _parse_resolutions(text: str) -> tuple:
    sizes = tuple(int(part) for part in text.split(",") if part.strip())
    if not sizes:
        raise ValueError("expected a comma-separated list of box sizes")
    return sizes


def _parse_bandwidth(text: str) -> Optional[float]:
    if text.strip().lower() == "auto":
        return None
    value = float(text)
    if value <= 0:
        raise ValueError("bandwidth must be > 0")
    return value


def _parse_format(text: str) -> str:
    value = text.strip().lower()
    if value not in ("csv", "json"):
        raise ValueError("format must be csv or json")
    return value


def _parse_int(text: str) -> int:
    return int(text.strip())


class ConfigKey(NamedTuple):
    parse: Callable[[str], object]
    default: object
    help: str


CONFIG_KEYS: Dict[str, ConfigKey] = {
    # GameParams
    "epsilon": ConfigKey(float, REQUIRED, "coupling strength in [0, 1]"),
    "u": ConfigKey(float, REQUIRED, "power-law scale parameter in (0, 1)"),
    "D": ConfigKey(float, REQUIRED, "power-law scaling parameter, != 1"),
    "mu": ConfigKey(float, REQUIRED, "mean return per clock time"),
    "dt": ConfigKey(float, REQUIRED, "round duration in clock time"),
    "sigma": ConfigKey(float, REQUIRED, "fixed volatility component"),
    "b": ConfigKey(float, DEFAULT_B, "evolutionary pressure"),
    "hbar_s": ConfigKey(float, DEFAULT_HBAR_S, "shares' Planck-like constant"),
    "s0": ConfigKey(float, DEFAULT_S0, "initial price"),
    "seed": ConfigKey(_parse_int, DEFAULT_SEED, "64-bit PRNG seed"),
    "rounds": ConfigKey(_parse_int, DEFAULT_ROUNDS, "total rounds to simulate"),
    "transient": ConfigKey(_parse_int, DEFAULT_TRANSIENT, "leading rounds discarded"),
    "i0": ConfigKey(_parse_i0, None, "initial fundamental driver in [0, 1) or 'random'"),
    "r_init": ConfigKey(float, 0.0, "return fed to the first round's coupling"),
    "precision_refill": ConfigKey(_parse_bool, True, "refill digits lost by float doubling"),
    "ladder_depth": ConfigKey(_parse_int, DEFAULT_LADDER_DEPTH, "levels enumerated per round"),
    # Analysis
    "resolutions": ConfigKey(_parse_resolutions, DEFAULT_RESOLUTIONS, "spectrum box sizes"),
    "bandwidth": ConfigKey(_parse_bandwidth, None, "kernel bandwidth or 'auto'"),
    "alpha_step": ConfigKey(float, DEFAULT_ALPHA_STEP, "Hoelder exponent grid step"),
    "min_boxes": ConfigKey(_parse_int, DEFAULT_MIN_BOXES, "minimum valid boxes per resolution"),
    "normalize": ConfigKey(_parse_bool, True, "rescale signals to unit range before coarse-graining"),
    "bins": ConfigKey(_parse_int, DEFAULT_BINS, "log-histogram bin count"),
    "max_lag": ConfigKey(_parse_int, DEFAULT_MAX_LAG, "autocorrelation lags"),
    "workers": ConfigKey(_parse_int, 1, "threads for per-resolution analysis"),
    # Output
    "out": ConfigKey(str, ".", "output directory"),
    "format": ConfigKey(_parse_format, "csv", "tabular output format: csv or json"),
}

GAME_KEYS = (
    "epsilon", "u", "D", "mu", "dt", "sigma", "b", "hbar_s", "s0", "seed",
    "rounds", "transient", "i0", "r_init", "precision_refill", "ladder_depth",
)


def load_config_file(path: str) -> Dict[str, str]:
    """Read a flat ``key = value`` file. Returns raw string values."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e}") from e

    raw = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(key, f"unknown key in {path}:{lineno}")
        raw[key] = value
    logger.debug(f"Loaded {len(raw)} keys from {path}")
    return raw


def build_run_config(file_values: Dict[str, str], flag_values: Dict[str, Optional[str]]) -> RunConfig:
    """Resolve every key: flag > config file > default."""
    values, sources = {}, {}
    for key, spec in CONFIG_KEYS.items():
        if flag_values.get(key) is not None:
            text, source = flag_values[key], "flag"
        elif key in file_values:
            text, source = file_values[key], "file"
        else:
            values[key] = spec.default
            sources[key] = "default"
            continue
        try:
            values[key] = spec.parse(text)
        except ValueError as e:
            raise ConfigError(key, f"invalid value {text!r} ({e})") from e
        sources[key] = source
    return RunConfig(values=values, sources=sources)


def game_params(cfg: RunConfig) -> GameParams:
    """Validate the simulation keys into a GameParams."""
    kwargs = {}
    for key in GAME_KEYS:
        value = cfg.values[key]
        if value is REQUIRED:
            raise ConfigError(key, "missing required key")
        kwargs[key] = value
    return GameParams(**kwargs)


def analysis_settings(cfg: RunConfig) -> AnalysisSettings:
    v = cfg.values
    if any(size < 2 for size in v["resolutions"]):
        raise ConfigError("resolutions", "box sizes must be >= 2")
    for key in ("bins", "max_lag", "min_boxes", "workers"):
        if v[key] < 1:
            raise ConfigError(key, "must be >= 1")
    if v["alpha_step"] <= 0:
        raise ConfigError("alpha_step", "must be > 0")
    return AnalysisSettings(
        resolutions=tuple(v["resolutions"]),
        bandwidth=v["bandwidth"],
        alpha_step=v["alpha_step"],
        min_boxes=v["min_boxes"],
        normalize=v["normalize"],
        bins=v["bins"],
        max_lag=v["max_lag"],
        workers=v["workers"],
    )
