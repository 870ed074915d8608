"""Chaotic volatility driver and the round engine.

The fundamental driver I_t follows the coupled shift map
    I_t = (1 - eps) * (2 I_{t-1} mod 1) + eps * |r_{t-1}|
and the kinetic volatility component is its power-law image
    K_t = (1 + I_t / u) ** (1 - D).
The engine iterates I (canonical state) and derives K, tau_B = 2K and the
round oscillator from it; the literal K -> K map is kept separately as
``kinetic_map_direct``.

Randomness: one numpy ``Generator(PCG64(seed))`` per simulation. Draw order
per run is I0 (when random), then per round the refill fraction (when
enabled) followed by one ``standard_normal`` variate (ziggurat method).
"""

import logging
import math

import numpy as np

from exceptions import DomainError, NumericalError
from models import ENGINE_VERSION, GameParams, RoundState, Trajectory
from oscillator import derive_round_oscillator, equilibrium_strategy, intrinsic_time_from_frequency

logger = logging.getLogger(__name__)

# Width of the digits a float64 doubling shifts in from below resolution.
REFILL_SCALE = 2.0**-52


def _violates(value, predicate) -> bool:
    if isinstance(value, (int, float)):
        return predicate(value)
    return bool(np.any(predicate(np.asarray(value, dtype=float))))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def shift_step(i_prev, r_prev, epsilon: float, tail=0.0):
    """One step of the coupled shift map, (1-eps)*(2I mod 1) + eps*|r|.

    ``tail`` in [0, 2**-52) supplies the binary digits below machine
    resolution that the doubling exposes; 0 reproduces the literal map.
    """
    if _violates(i_prev, lambda v: v < 0):
        raise DomainError("i_prev", f"must be >= 0 (got {i_prev})")
    doubled = (2.0 * i_prev) % 1.0 + tail
    return (1.0 - epsilon) * doubled + epsilon * abs(r_prev)


def k_from_i(i, u: float, D: float):
    """K = (1 + I/u)^(1-D)."""
    if _violates(i, lambda v: v < 0):
        raise DomainError("i", f"must be >= 0 (got {i})")
    return (1.0 + i / u) ** (1.0 - D)


def i_from_k(k, u: float, D: float):
    """Inverse power law, I = u (K^(1/(1-D)) - 1)."""
    if _violates(k, lambda v: v <= 0):
        raise DomainError("k", f"must be > 0 (got {k})")
    return u * (k ** (1.0 / (1.0 - D)) - 1.0)


def kinetic_map_direct(k_prev, r_prev, p: GameParams):
    """The K -> K power-law map as the literal composition through I."""
    i_prev = i_from_k(k_prev, p.u, p.D)
    return k_from_i(shift_step(i_prev, r_prev, p.epsilon), p.u, p.D)


def invariant_density_exponent(D: float) -> float:
    """Log-log slope D/(1-D) of the stationary K density at eps = 0."""
    if D == 1.0:
        raise DomainError("D", "must be != 1")
    return D / (1.0 - D)


def invariant_support(u: float, D: float):
    """Range of K over I in [0, 1], as (low, high)."""
    edge = (1.0 + 1.0 / u) ** (1.0 - D)
    return (min(edge, 1.0), max(edge, 1.0))


def invariant_density(k, u: float, D: float):
    """Stationary density of K at eps = 0: u/|1-D| * K^(D/(1-D)) on the support.

    Obtained by pushing the shift map's uniform density on I through the
    power law.
    """
    exponent = invariant_density_exponent(D)
    low, high = invariant_support(u, D)
    k = np.asarray(k, dtype=float)
    inside = (k >= low) & (k <= high)
    density = np.where(inside, u / abs(1.0 - D) * np.where(inside, k, 1.0) ** exponent, 0.0)
    return density if density.ndim else float(density)


def intrinsic_time(k: float) -> float:
    """tau_B = 2K."""
    if not k > 0:
        raise DomainError("k", f"must be > 0 (got {k})")
    return 2.0 * k


def sample_return(k: float, p: GameParams, rng: np.random.Generator):
    """Draw fitness x ~ N(0, 2K) from the ground state and r = mu*dt + sigma*x."""
    x = math.sqrt(2.0 * k) * rng.standard_normal()
    return x, p.mu * p.dt + p.sigma * x


def _round_state(t, i, p: GameParams, x, r, s) -> RoundState:
    k = k_from_i(i, p.u, p.D)
    tau_b = intrinsic_time(k)
    osc = derive_round_oscillator(p.hbar_s, p.b, tau_b)
    return RoundState(t=t, i=i, k=k, tau_b=tau_b, omega=osc.omega, mass=osc.mass, x=x, r=r, s=s)


def initial_state(p: GameParams, rng: np.random.Generator) -> RoundState:
    """Round 0: I0 from config or the PRNG, r = r_init, S = S0."""
    i0 = p.i0 if p.i0 is not None else rng.random()
    return _round_state(0, i0, p, 0.0, p.r_init, p.s0)


def step_round(prev: RoundState, p: GameParams, rng: np.random.Generator) -> RoundState:
    t = prev.t + 1
    tail = rng.random() * REFILL_SCALE if p.precision_refill else 0.0
    i = shift_step(prev.i, prev.r, p.epsilon, tail)
    k = k_from_i(i, p.u, p.D)
    if not (math.isfinite(i) and math.isfinite(k) and k > 0):
        raise NumericalError(f"non-finite volatility state (I={i}, K={k})", round_index=t)

    tau_b = intrinsic_time(k)
    osc = derive_round_oscillator(p.hbar_s, p.b, tau_b)
    strategy = equilibrium_strategy(osc, p.ladder_depth)
    if strategy.level.n != 0 or not math.isclose(strategy.theta**2, tau_b, rel_tol=1e-9):
        raise NumericalError(
            f"equilibrium check failed (n={strategy.level.n}, theta^2={strategy.theta**2}, tau_B={tau_b})",
            round_index=t,
        )
    if not math.isclose(intrinsic_time_from_frequency(p.hbar_s, p.b, osc.omega), tau_b, rel_tol=1e-9):
        raise NumericalError("frequency does not reproduce tau_B", round_index=t)

    x, r = sample_return(k, p, rng)
    s = prev.s * math.exp(r)
    if not (math.isfinite(r) and math.isfinite(s) and s > 0):
        raise NumericalError(f"non-finite return or price (r={r}, S={s})", round_index=t)

    return RoundState(t=t, i=i, k=k, tau_b=tau_b, omega=osc.omega, mass=osc.mass, x=x, r=r, s=s)


def simulate(p: GameParams) -> Trajectory:
    """Run ``rounds`` rounds from the seeded initial state, keep the post-transient ones."""
    logger.info(
        f"Simulation started: seed={p.seed} rounds={p.rounds} transient={p.transient} "
        f"eps={p.epsilon} u={p.u} D={p.D}"
    )
    rng = make_rng(p.seed)
    state = initial_state(p, rng)
    kept = []
    for _ in range(p.rounds):
        state = step_round(state, p, rng)
        if state.t > p.transient:
            kept.append(state)

    metadata = {
        "engine_version": ENGINE_VERSION,
        "seed": p.seed,
        "rng": "numpy PCG64",
        "gaussian": "numpy standard_normal (ziggurat)",
        "rounds": p.rounds,
        "transient": p.transient,
        "kept": len(kept),
    }
    logger.info(f"Simulation complete: kept {len(kept)} rounds")
    return Trajectory(params=p, states=tuple(kept), metadata=metadata)
