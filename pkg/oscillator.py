"""Per-round harmonic-oscillator risk minimization, solved in closed form.

Each round the company minimizes the expected squared value fitness
<x^2> subject to the round's time-independent Schroedinger equation with
H = -hbar_s^2/(2m) d^2/dx^2 + (b/2) x^2. The spectrum is discrete, so the
optimization is an enumeration over the energy ladder; the minimizer is
always the ground state, a mean-zero Gaussian with variance theta^2 = tau_B.
"""

import math

import numpy as np
from scipy.integrate import simpson
from scipy.stats import norm

from exceptions import DomainError, NumericalError
from models import EnergyLevel, EquilibriumStrategy, RoundOscillator

# Factorial normalization stays representable up to this level.
MAX_LEVEL = 170

QUADRATURE_NODES = 20001
QUADRATURE_HALF_WIDTH = 10.0  # in units of theta * sqrt(2n + 1)
QUADRATURE_TOLERANCE = 1e-9


def _check_level(n: int) -> None:
    if n < 0:
        raise DomainError("n", f"quantum number must be >= 0 (got {n})")
    if n > MAX_LEVEL:
        raise DomainError("n", f"quantum number above {MAX_LEVEL} is not supported (got {n})")


def derive_round_oscillator(hbar_s: float, b: float, tau_B: float) -> RoundOscillator:
    """Build the round's oscillator from its intrinsic time interval."""
    for name, value in (("hbar_s", hbar_s), ("b", b), ("tau_B", tau_B)):
        if not value > 0:
            raise DomainError(name, f"must be > 0 (got {value})")

    omega = 2.0 * b * tau_B / hbar_s
    mass = hbar_s**2 / (4.0 * b * tau_B**2)
    alpha = (mass * b / hbar_s**2) ** 0.25
    theta = 1.0 / (math.sqrt(2.0) * alpha)
    return RoundOscillator(hbar_s=hbar_s, b=b, omega=omega, mass=mass, alpha=alpha, theta=theta)


def intrinsic_time_from_frequency(hbar_s: float, b: float, omega: float) -> float:
    """tau_B = hbar_s * omega / (2b)."""
    return hbar_s * omega / (2.0 * b)


def energy_level(osc: RoundOscillator, n: int) -> EnergyLevel:
    _check_level(n)
    return EnergyLevel(n=n, energy=(n + 0.5) * osc.hbar_s * osc.omega)


def hermite(n: int, y):
    """Physicists' Hermite polynomial H_n by the three-term recurrence."""
    if n < 0:
        raise DomainError("n", f"Hermite degree must be >= 0 (got {n})")
    y = np.asarray(y, dtype=float)
    h_prev = np.ones_like(y)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * y
    for k in range(1, n):
        h_prev, h = h, 2.0 * y * h - 2.0 * k * h_prev
    return h if h.ndim else float(h)


def eigenfunction(osc: RoundOscillator, n: int, x):
    """psi_n(x) = (alpha / (sqrt(pi) 2^n n!))^(1/2) exp(-alpha^2 x^2 / 2) H_n(alpha x).

    Evaluated through the normalized recurrence of the Hermite functions,
    seeded with the ground state in log-space, so neither 2^n n! nor
    H_n(alpha x) is formed explicitly.
    """
    _check_level(n)
    y = osc.alpha * np.asarray(x, dtype=float)
    log_psi0 = 0.5 * math.log(osc.alpha) - 0.25 * math.log(math.pi) - 0.5 * y**2
    psi_prev = np.zeros_like(y)
    psi = np.exp(log_psi0)
    for k in range(n):
        psi_prev, psi = psi, math.sqrt(2.0 / (k + 1)) * y * psi - math.sqrt(k / (k + 1)) * psi_prev
    return psi if psi.ndim else float(psi)


def expected_risk(osc: RoundOscillator, n: int) -> float:
    """<x^2> in the n-th eigenstate, (n + 1/2) / alpha^2."""
    _check_level(n)
    return (n + 0.5) / osc.alpha**2


def equilibrium_strategy(osc: RoundOscillator, n_max: int) -> EquilibriumStrategy:
    """Enumerate the ladder up to n_max and return the risk minimizer."""
    if n_max < 1:
        raise DomainError("n_max", f"must be >= 1 (got {n_max})")
    _check_level(n_max)
    risks = [expected_risk(osc, n) for n in range(n_max + 1)]
    best = min(range(n_max + 1), key=risks.__getitem__)
    return EquilibriumStrategy(level=energy_level(osc, best), theta=osc.theta, min_risk=risks[best])


def ground_state_density(osc: RoundOscillator, x):
    """|psi_0(x)|^2, a N(0, theta^2) density."""
    return norm.pdf(x, loc=0.0, scale=osc.theta)


def returns_density(osc: RoundOscillator, mu: float, dt: float, sigma: float, r):
    """Intrinsic-time density of returns: N(mu*dt, tau_B*sigma^2) with tau_B = theta^2."""
    if not sigma > 0:
        raise DomainError("sigma", f"must be > 0 (got {sigma})")
    if not dt > 0:
        raise DomainError("dt", f"must be > 0 (got {dt})")
    return norm.pdf(r, loc=mu * dt, scale=osc.theta * sigma)


def returns_wave_function(osc: RoundOscillator, mu: float, dt: float, sigma: float, r):
    """Ground-state amplitude over returns; its square is ``returns_density``."""
    return np.sqrt(returns_density(osc, mu, dt, sigma, r))


def neoclassical_density(mu: float, dt: float, sigma: float, r):
    """Clock-time Gaussian random walk: N(mu*dt, dt*sigma^2)."""
    if not sigma > 0:
        raise DomainError("sigma", f"must be > 0 (got {sigma})")
    if not dt > 0:
        raise DomainError("dt", f"must be > 0 (got {dt})")
    return norm.pdf(r, loc=mu * dt, scale=math.sqrt(dt) * sigma)


def numeric_moment(
    osc: RoundOscillator,
    n: int,
    power: int,
    nodes: int = QUADRATURE_NODES,
    half_width: float = QUADRATURE_HALF_WIDTH,
) -> float:
    """Composite Simpson estimate of the integral of |psi_n(x)|^2 x^power.

    The grid is symmetric, [-L, L] with L = half_width * theta * sqrt(2n + 1).
    The discretization error is estimated against the same rule on every
    other node; an estimate above tolerance raises NumericalError.
    """
    _check_level(n)
    if power not in (0, 1, 2):
        raise DomainError("power", f"must be 0, 1 or 2 (got {power})")
    if nodes < 10_000 or half_width < 10.0:
        raise NumericalError(
            f"grid too coarse: need >= 10000 nodes over >= 10 theta (got {nodes} over {half_width} theta)"
        )
    if nodes % 2 == 0:
        nodes += 1

    limit = half_width * osc.theta * math.sqrt(2 * n + 1)
    x = np.linspace(-limit, limit, nodes)
    integrand = eigenfunction(osc, n, x) ** 2 * x**power

    fine = simpson(integrand, x=x)
    coarse = simpson(integrand[::2], x=x[::2])
    error = abs(fine - coarse)
    if not math.isfinite(fine) or error > QUADRATURE_TOLERANCE * max(1.0, abs(fine)):
        raise NumericalError(f"quadrature did not converge (error estimate {error:.3e})")
    return float(fine)
