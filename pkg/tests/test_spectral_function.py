"""
test_spectral_function.py

Unit tests for the spectral function J(omega): transition lines, their broadening and the sum rule that
ties the broadened curve back to the unbroadened double sum.
"""
import numpy as np
import pytest
from VIF.Spectrum import fermi
from VIF.ForceMatrix import force_matrix_elements
from VIF.SpectralFunction import (JSamples, spectral_function, transition_lines, broaden, default_broadening,
                                  default_omega_grid)
from VIF.TransverseForce import transverse_coefficient_virtual
from VIF.Grid import UniformGrid
from VIF.errors import DomainError
from tests.helpers import two_level, cluster_rotation


@pytest.mark.parametrize('eta_b', [0.02, 0.05, 0.1])
def test_two_level_line_and_sum_rule(eta_b):
    elements, spectrum = two_level(m0=0.3, gap=2.0)
    grid = UniformGrid.covering(0.0, 2.0 + 10 * eta_b, eta_b / 4)
    j = spectral_function(elements, spectrum, grid, eta_b)
    assert np.array_equal(j.lines_omega, [2.0])
    assert j.total_weight == pytest.approx(np.pi * 0.09, rel=1e-12)
    assert j.integrated_weight() == pytest.approx(j.total_weight, rel=1e-6)
    assert j.omega[np.argmax(j.values)] == pytest.approx(2.0, abs=eta_b / 4)
    assert np.all(j.values >= 0)


def test_thermal_line_weight():
    beta = 1.5
    elements, spectrum = two_level(m0=0.3, gap=2.0, beta=beta)
    _, weights = transition_lines(elements, spectrum)
    f = fermi([-1.0, 1.0], beta)
    assert weights[0] == pytest.approx(np.pi * (f[0] - f[1]) * 0.09)


def test_reflection_keeps_weight_near_zero():
    elements, spectrum = two_level(m0=0.3, gap=0.02)
    grid = UniformGrid.covering(0.0, 1.0, 0.0125)
    j = spectral_function(elements, spectrum, grid, eta_b=0.05)
    assert j.integrated_weight() == pytest.approx(j.total_weight, rel=1e-6)
    assert j.zero_is_singular()


def test_clean_vortex_sum_rule(clean_model, vortex, vortex_spectrum):
    elements = force_matrix_elements(clean_model, vortex, vortex_spectrum)
    eta_b = default_broadening(vortex_spectrum, cutoff=4.0)
    grid = default_omega_grid(vortex_spectrum, eta_b)
    j = spectral_function(elements, vortex_spectrum, grid, eta_b)
    assert j.total_weight > 0
    assert j.integrated_weight() == pytest.approx(j.total_weight, rel=1e-6)
    assert np.all(j.values >= 0)


def test_degenerate_basis_independence(clean_model, vortex, vortex_spectrum):
    elements = force_matrix_elements(clean_model, vortex, vortex_spectrum)
    w = cluster_rotation(vortex_spectrum, 1e-8)
    rotated_spectrum = vortex_spectrum.with_states(vortex_spectrum.states @ w)
    rotated = elements.in_basis(w)
    grid = UniformGrid.covering(0.0, 10.0, 0.02)
    j = spectral_function(elements, vortex_spectrum, grid, 0.1)
    j_rot = spectral_function(rotated, rotated_spectrum, grid, 0.1)
    assert np.allclose(j_rot.values, j.values, rtol=1e-6, atol=1e-12 * j.values.max())
    b = transverse_coefficient_virtual(elements, vortex_spectrum).b
    b_rot = transverse_coefficient_virtual(rotated, rotated_spectrum).b
    assert b_rot == pytest.approx(b, rel=1e-6)


def test_broaden_without_lines():
    assert not np.any(broaden(np.linspace(0, 1, 5), np.zeros(0), np.zeros(0), 0.1))


def test_zero_limit_ratio():
    omega = np.linspace(0.0, 1.0, 11)
    j = JSamples(omega, 0.7 * omega, eta_b=0.1)
    assert j.zero_limit_ratio() == pytest.approx(0.7)
    assert not j.zero_is_singular()
    assert j.scaled(2.0).zero_limit_ratio() == pytest.approx(1.4)


@pytest.mark.parametrize('grid, eta_b', [([], 0.1), ([0.0, -0.1], 0.1), ([0.2, 0.1], 0.1), ([0.0, 0.1], 0.0)])
def test_domain(grid, eta_b):
    elements, spectrum = two_level()
    with pytest.raises(DomainError):
        spectral_function(elements, spectrum, grid, eta_b)


def test_default_grids(vortex_spectrum):
    eta_b = default_broadening(vortex_spectrum, cutoff=4.0)
    assert eta_b > 0
    grid = default_omega_grid(vortex_spectrum, eta_b)
    assert grid.origin == 0.0
    assert grid.spacing == pytest.approx(eta_b / 4)
    assert grid.stop >= vortex_spectrum.energies[-1] - vortex_spectrum.energies[0]
