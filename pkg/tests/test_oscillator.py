import math

import numpy as np
import pytest
from scipy.integrate import simpson

from exceptions import DomainError, NumericalError
from oscillator import (
    derive_round_oscillator,
    eigenfunction,
    energy_level,
    equilibrium_strategy,
    expected_risk,
    ground_state_density,
    hermite,
    intrinsic_time_from_frequency,
    neoclassical_density,
    numeric_moment,
    returns_density,
    returns_wave_function,
)


@pytest.fixture
def unit_osc():
    # alpha = 1: hbar_s = b = mass = 1
    return derive_round_oscillator(1.0, 1.0, 0.5)


@pytest.mark.parametrize(
    "hbar_s, b, tau_B, omega, mass, theta_sq",
    [
        (1.0, 1.0, 1.0, 2.0, 0.25, 1.0),
        (1.0, 1.0, 0.5, 1.0, 1.0, 0.5),
        (1.0, 2.0, 0.5, 2.0, 0.5, 0.5),
    ],
)
def test_derive_round_oscillator(hbar_s, b, tau_B, omega, mass, theta_sq):
    osc = derive_round_oscillator(hbar_s, b, tau_B)
    assert osc.omega == pytest.approx(omega)
    assert osc.mass == pytest.approx(mass)
    assert osc.theta**2 == pytest.approx(theta_sq)
    assert osc.omega**2 * osc.mass == pytest.approx(b)
    assert osc.alpha * osc.theta * math.sqrt(2.0) == pytest.approx(1.0)
    assert osc.theta**2 == pytest.approx(hbar_s / (2.0 * osc.mass * osc.omega))


@pytest.mark.parametrize("name, args", [("hbar_s", (0.0, 1.0, 1.0)), ("b", (1.0, -1.0, 1.0)), ("tau_B", (1.0, 1.0, 0.0))])
def test_derive_round_oscillator_rejects_nonpositive(name, args):
    with pytest.raises(DomainError) as exc:
        derive_round_oscillator(*args)
    assert exc.value.parameter == name


def test_frequency_inverts_intrinsic_time():
    osc = derive_round_oscillator(1.3, 0.7, 0.021)
    assert intrinsic_time_from_frequency(1.3, 0.7, osc.omega) == pytest.approx(0.021, rel=1e-12)


def test_energy_level():
    osc = derive_round_oscillator(1.0, 1.0, 1.0)  # omega = 2
    assert energy_level(osc, 0).energy == pytest.approx(1.0)
    assert energy_level(derive_round_oscillator(1.0, 1.0, 0.5), 1).energy == pytest.approx(1.5)

    k = 3e-4
    ground = energy_level(derive_round_oscillator(1.0, 1.0, 2 * k), 0)
    assert ground.energy == pytest.approx(2 * k)

    with pytest.raises(DomainError):
        energy_level(osc, -1)


def test_energy_ladder_is_strictly_increasing(unit_osc):
    energies = [energy_level(unit_osc, n).energy for n in range(21)]
    risks = [expected_risk(unit_osc, n) for n in range(21)]
    assert all(a < b for a, b in zip(energies, energies[1:]))
    assert all(a < b for a, b in zip(risks, risks[1:]))


def test_hermite_values():
    assert hermite(0, 3.7) == 1.0
    assert hermite(2, 1.0) == 2.0
    assert hermite(3, 1.0) == -4.0
    np.testing.assert_allclose(hermite(4, np.array([0.0, 1.0])), [12.0, -20.0])
    with pytest.raises(DomainError):
        hermite(-1, 0.0)


def test_eigenfunction_values(unit_osc):
    assert eigenfunction(unit_osc, 0, 0.0) == pytest.approx(math.pi**-0.25)
    assert eigenfunction(unit_osc, 1, 0.0) == pytest.approx(0.0, abs=1e-15)


def test_eigenfunction_matches_closed_form(unit_osc):
    x = np.linspace(-4, 4, 41)
    for n in range(6):
        prefactor = (1.0 / (math.sqrt(math.pi) * 2**n * math.factorial(n))) ** 0.5
        expected = prefactor * np.exp(-(x**2) / 2) * hermite(n, x)
        np.testing.assert_allclose(eigenfunction(unit_osc, n, x), expected, rtol=1e-10, atol=1e-14)


def test_eigenfunction_high_level_stays_finite(unit_osc):
    values = eigenfunction(unit_osc, 170, np.linspace(-20, 20, 101))
    assert np.all(np.isfinite(values))


@pytest.mark.parametrize("n", range(11))
def test_eigenfunctions_are_normalized(unit_osc, n):
    assert numeric_moment(unit_osc, n, 0) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("n", range(11))
def test_expected_risk_matches_quadrature(n):
    osc = derive_round_oscillator(1.0, 1.0, 3e-4)
    assert numeric_moment(osc, n, 2) == pytest.approx(expected_risk(osc, n), rel=1e-6)


def test_expected_risk_values(unit_osc):
    assert expected_risk(unit_osc, 0) == pytest.approx(0.5)
    assert expected_risk(unit_osc, 3) == pytest.approx(3.5)
    assert expected_risk(unit_osc, 2) == pytest.approx(energy_level(unit_osc, 2).energy / unit_osc.b)


def test_numeric_moment_examples(unit_osc):
    assert numeric_moment(unit_osc, 0, 0) == pytest.approx(1.0, abs=1e-8)
    assert numeric_moment(unit_osc, 0, 1) == pytest.approx(0.0, abs=1e-10)
    assert numeric_moment(unit_osc, 2, 2) == pytest.approx(2.5, abs=1e-6)


def test_numeric_moment_rejects_coarse_grid(unit_osc):
    with pytest.raises(NumericalError):
        numeric_moment(unit_osc, 0, 2, nodes=101)
    with pytest.raises(NumericalError):
        numeric_moment(unit_osc, 0, 2, half_width=3.0)
    with pytest.raises(DomainError):
        numeric_moment(unit_osc, 0, 3)


def test_equilibrium_strategy(unit_osc):
    strategy = equilibrium_strategy(unit_osc, 5)
    assert strategy.level.n == 0
    assert strategy.min_risk == pytest.approx(0.5)
    assert equilibrium_strategy(unit_osc, 20).level.n == 0
    with pytest.raises(DomainError):
        equilibrium_strategy(unit_osc, 0)


def test_equilibrium_is_ground_state_for_random_oscillators():
    rng = np.random.default_rng(7)
    for hbar_s, b, tau_B in zip(
        10 ** rng.uniform(-2, 2, 1000), 10 ** rng.uniform(-2, 2, 1000), 10 ** rng.uniform(-6, 1, 1000)
    ):
        osc = derive_round_oscillator(hbar_s, b, tau_B)
        strategy = equilibrium_strategy(osc, 20)
        assert strategy.level.n == 0
        assert strategy.min_risk == pytest.approx(strategy.theta**2, rel=1e-10)
        assert strategy.min_risk == pytest.approx(strategy.level.energy / b, rel=1e-10)
        assert strategy.theta**2 == pytest.approx(tau_B, rel=1e-10)


def test_ground_state_density(unit_osc):
    unit_theta = derive_round_oscillator(1.0, 1.0, 1.0)
    assert ground_state_density(unit_theta, 0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi))

    x = np.linspace(-12 * unit_osc.theta, 12 * unit_osc.theta, 20001)
    rho = ground_state_density(unit_osc, x)
    assert simpson(rho, x=x) == pytest.approx(1.0, abs=1e-8)
    assert simpson(rho * x**2, x=x) == pytest.approx(unit_osc.theta**2, rel=1e-8)
    np.testing.assert_allclose(rho, eigenfunction(unit_osc, 0, x) ** 2, rtol=1e-10, atol=1e-300)


def test_returns_density():
    osc = derive_round_oscillator(1.0, 1.0, 1.0)  # tau_B = theta^2 = 1
    assert returns_density(osc, 0.0, 1.0, 1.0, 0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi))

    osc = derive_round_oscillator(1.0, 1.0, 3e-4)
    mu, dt, sigma = 1e-6, 1.0, 0.02
    width = osc.theta * sigma
    r = np.linspace(mu * dt - 12 * width, mu * dt + 12 * width, 20001)
    variance = simpson((r - mu * dt) ** 2 * returns_density(osc, mu, dt, sigma, r), x=r)
    assert variance == pytest.approx(3e-4 * sigma**2, rel=1e-8)
    np.testing.assert_allclose(returns_wave_function(osc, mu, dt, sigma, r) ** 2, returns_density(osc, mu, dt, sigma, r))

    with pytest.raises(DomainError):
        returns_density(osc, mu, dt, 0.0, 0.0)


def test_returns_density_reduces_to_neoclassical_walk():
    dt, mu, sigma = 2.0, 1e-3, 0.05
    osc = derive_round_oscillator(1.0, 1.0, dt)
    r = np.linspace(-0.5, 0.5, 100)
    np.testing.assert_allclose(returns_density(osc, mu, dt, sigma, r), neoclassical_density(mu, dt, sigma, r), rtol=1e-12)
