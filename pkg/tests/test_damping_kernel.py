"""
test_damping_kernel.py

Unit tests for the imaginary-time damping kernel F(tau) and its overflow-free thermal factor.
"""
import numpy as np
import pytest
from VIF.SpectralFunction import JSamples, spectral_function
from VIF.DampingKernel import DampingSamples, damping_kernel, thermal_ratio, default_tau_grid
from VIF.Grid import UniformGrid
from VIF.errors import DomainError
from tests.helpers import two_level


def closed_form(m0, gap, tau, beta):
    """ F(tau) of the two-level line, including the thermal occupation difference of its states """
    if np.isinf(beta):
        return m0 ** 2 * np.exp(-gap * tau)
    occupied = np.tanh(beta * gap / 4)
    return occupied * m0 ** 2 * np.cosh(gap * (beta / 2 - tau)) / np.sinh(gap * beta / 2)


def test_thermal_ratio_matches_hyperbolic_form():
    omega = np.array([0.1, 1.0, 3.0])[:, None]
    tau = np.linspace(0.0, 4.0, 9)[None, :]
    direct = np.cosh(omega * (2.0 - tau)) / np.sinh(omega * 2.0)
    assert np.allclose(thermal_ratio(omega, tau, 4.0), direct, rtol=1e-12)


def test_thermal_ratio_does_not_overflow():
    values = thermal_ratio(np.array([50.0]), np.array([0.0, 5e3, 1e4]), 1e4)
    assert np.all(np.isfinite(values))
    assert values[0] == pytest.approx(1.0)
    assert values[2] == pytest.approx(1.0)


@pytest.mark.parametrize('beta', [5.0, np.inf])
def test_lines_method_is_exact(beta):
    elements, spectrum = two_level(m0=0.3, gap=2.0, beta=beta)
    j = spectral_function(elements, spectrum, UniformGrid.covering(0.0, 3.0, 0.005), 0.02)
    tau = default_tau_grid(beta, count=51, tau_max=10.0)
    f = damping_kernel(j, tau, beta, method='lines')
    expected = closed_form(0.3, 2.0, tau.values, beta)
    assert np.allclose(f.values, expected, rtol=1e-8)


def test_quadrature_agrees_with_lines():
    beta = 5.0
    elements, spectrum = two_level(m0=0.3, gap=2.0, beta=beta)
    j = spectral_function(elements, spectrum, UniformGrid.covering(0.0, 3.0, 0.005), 0.02)
    tau = default_tau_grid(beta, count=51)
    quadrature = damping_kernel(j, tau, beta)
    lines = damping_kernel(j, tau, beta, method='lines')
    assert np.allclose(quadrature.values, lines.values, rtol=1e-2)
    assert not quadrature.ir_singular


def test_mirror_symmetry():
    elements, spectrum = two_level(m0=0.3, gap=0.5, beta=3.0)
    j = spectral_function(elements, spectrum, UniformGrid.covering(0.0, 2.0, 0.01), 0.05)
    f = damping_kernel(j, default_tau_grid(3.0, count=61), 3.0)
    assert f.symmetry_error() < 1e-8
    assert np.all(f.values > 0)


def test_infrared_flag():
    omega = np.linspace(0.0, 2.0, 401)
    values = np.exp(-0.5 * (omega / 0.1) ** 2)
    f = damping_kernel(JSamples(omega, values, 0.1), default_tau_grid(4.0, count=21), 4.0)
    assert f.ir_singular


def test_zero_spectral_function_gives_zero_kernel():
    omega = np.linspace(0.0, 2.0, 11)
    f = damping_kernel(JSamples(omega, np.zeros(11), 0.1), default_tau_grid(np.inf, count=11), np.inf)
    assert not np.any(f.values)


@pytest.mark.parametrize('tau, beta, method', [([0.0, 6.0], 5.0, 'quadrature'), ([-1.0, 0.0], 5.0, 'quadrature'),
                                               ([], 5.0, 'quadrature'), ([0.0, 1.0], 0.0, 'quadrature'),
                                               ([0.0, 1.0], 5.0, 'matsubara')])
def test_domain(tau, beta, method):
    j = JSamples(np.linspace(0.0, 1.0, 5), np.zeros(5), 0.1)
    with pytest.raises(DomainError):
        damping_kernel(j, tau, beta, method)


def test_symmetry_error_detects_asymmetry():
    tau = np.linspace(0.0, 2.0, 5)
    assert DampingSamples(tau, [1.0, 0.5, 0.4, 0.5, 1.0], 2.0).symmetry_error() == 0.0
    assert DampingSamples(tau, [1.0, 0.5, 0.4, 0.6, 1.0], 2.0).symmetry_error() > 1e-3


def test_default_tau_grid():
    assert default_tau_grid(2.0, count=5).stop == pytest.approx(2.0)
    assert default_tau_grid(np.inf, count=5, tau_max=8.0).stop == pytest.approx(8.0)
