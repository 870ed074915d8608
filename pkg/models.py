"""Domain records for the quantum market game and its analysis."""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from exceptions import ConfigError

ENGINE_VERSION = "1.0.0"


# ---------------------------------------------------------------------------
# Oscillator
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class RoundOscillator:
    """The round's harmonic-oscillator restriction."""

    hbar_s: float
    b: float
    omega: float  # business-cycle angular frequency
    mass: float
    alpha: float  # Gaussian width parameter
    theta: float  # volatility parameter, theta**2 == tau_B


@dataclass(frozen=True, slots=True)
class EnergyLevel:
    n: int
    energy: float


@dataclass(frozen=True, slots=True)
class EquilibriumStrategy:
    """Risk-minimizing level of the round's energy ladder."""

    level: EnergyLevel
    theta: float
    min_risk: float


# ---------------------------------------------------------------------------
# Dynamics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GameParams:
    """Model constants plus run controls. Validated on construction."""

    epsilon: float
    u: float
    D: float
    mu: float
    dt: float
    sigma: float
    b: float = 1.0
    hbar_s: float = 1.0
    s0: float = 1.0
    seed: int = 0
    rounds: int = 30000
    transient: int = 10000
    i0: Optional[float] = None  # None draws I0 from the run's PRNG
    r_init: float = 0.0
    precision_refill: bool = True
    ladder_depth: int = 2

    def __post_init__(self):
        checks = [
            ("epsilon", 0.0 <= self.epsilon <= 1.0, "must lie in [0, 1]"),
            ("u", 0.0 < self.u < 1.0, "must lie in (0, 1)"),
            ("D", math.isfinite(self.D) and self.D != 1.0, "must be finite and != 1"),
            ("mu", math.isfinite(self.mu), "must be finite"),
            ("dt", self.dt > 0.0, "must be > 0"),
            ("sigma", self.sigma > 0.0, "must be > 0"),
            ("b", self.b > 0.0, "must be > 0"),
            ("hbar_s", self.hbar_s > 0.0, "must be > 0"),
            ("s0", self.s0 > 0.0, "must be > 0"),
            ("seed", 0 <= self.seed < 2**64, "must be a 64-bit unsigned integer"),
            ("rounds", self.rounds >= 1, "must be >= 1"),
            ("transient", 0 <= self.transient < self.rounds, "must satisfy 0 <= transient < rounds"),
            ("i0", self.i0 is None or 0.0 <= self.i0 < 1.0, "must lie in [0, 1) or be 'random'"),
            ("r_init", math.isfinite(self.r_init), "must be finite"),
            ("ladder_depth", self.ladder_depth >= 1, "must be >= 1"),
        ]
        for key, ok, message in checks:
            if not ok:
                raise ConfigError(key, f"{message} (got {getattr(self, key)!r})")


@dataclass(frozen=True, slots=True)
class RoundState:
    """Full state of one round. ``i`` is canonical, ``k`` and ``tau_b`` derive from it."""

    t: int
    i: float
    k: float
    tau_b: float
    omega: float
    mass: float
    x: float
    r: float
    s: float


@dataclass(frozen=True)
class Trajectory:
    params: GameParams
    states: Tuple[RoundState, ...]
    metadata: Dict[str, object] = field(default_factory=dict)

    def __len__(self):
        return len(self.states)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.states], dtype=float)


# ---------------------------------------------------------------------------
# Analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ResolutionCurve:
    """Spectrum estimate at one box size."""

    box_size: int
    box_count: int  # the resolution label: number of boxes across the signal
    delta: float
    exponents: np.ndarray
    alpha: np.ndarray
    f: np.ndarray
    bandwidth: float
    dropped_boxes: int


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Large-deviation spectrum, curves ordered coarse to fine."""

    curves: Tuple[ResolutionCurve, ...]
    peak_alpha: float
    peak_f: float

    @property
    def finest(self) -> ResolutionCurve:
        return self.curves[-1]

    @property
    def points(self) -> List[Tuple[float, float, int]]:
        return [
            (float(a), float(f), c.box_count)
            for c in self.curves
            for a, f in zip(c.alpha, c.f)
        ]


@dataclass(frozen=True, eq=False)
class Histogram:
    edges: np.ndarray
    centers: np.ndarray  # geometric bin centers
    counts: np.ndarray
    density: np.ndarray


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    r_squared: float
    bin_count: int


@dataclass(frozen=True)
class SummaryStats:
    """Moments of a series. ``None`` marks an undefined statistic (zero variance)."""

    n: int
    mean: float
    std: float
    skewness: Optional[float]
    excess_kurtosis: Optional[float]
    acf_abs: Optional[Tuple[float, ...]]


# ---------------------------------------------------------------------------
# Ingest
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DatedSeries:
    dates: pd.DatetimeIndex
    values: np.ndarray
    source_label: str = ""

    def __len__(self):
        return len(self.values)


@dataclass
class IngestReport:
    rows_read: int = 0
    rows_kept: int = 0
    rows_dropped_malformed: int = 0
    rows_dropped_nonpositive: int = 0
    duplicate_dates_resolved: int = 0

    @property
    def balanced(self) -> bool:
        return self.rows_read == (
            self.rows_kept
            + self.rows_dropped_malformed
            + self.rows_dropped_nonpositive
            + self.duplicate_dates_resolved
        )


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalysisSettings:
    resolutions: Tuple[int, ...]
    bandwidth: Optional[float]  # None selects the normal-reference rule
    alpha_step: float
    min_boxes: int
    normalize: bool
    bins: int
    max_lag: int
    workers: int


@dataclass
class RunConfig:
    """Resolved configuration: every key's value and where it came from."""

    values: Dict[str, object]
    sources: Dict[str, str]

    def __getitem__(self, key):
        return self.values[key]

    @property
    def out_dir(self) -> str:
        return self.values["out"]

    @property
    def fmt(self) -> str:
        return self.values["format"]
