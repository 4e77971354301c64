"""
test_force_matrix.py

Unit tests for the matrix elements of the vortex-displacement force in the BdG eigenbasis.
"""
import numpy as np
import pytest
from VIF.LatticeModel import build_lattice
from VIF.PairField import seed_pair_field
from VIF.BdGMatrix import assemble_bdg
from VIF.Spectrum import diagonalize, occupations
from VIF.ForceMatrix import force_matrix_elements, pairing_block_elements
from VIF.errors import DomainError


@pytest.fixture(scope='module')
def elements(clean_model, vortex, vortex_spectrum):
    return force_matrix_elements(clean_model, vortex, vortex_spectrum, fd_step=0.01)


def test_elements_are_hermitian(elements):
    assert elements.hermiticity_error() < 1e-8
    assert not elements.vanishes


def test_only_pairing_blocks_contribute(elements, vortex_spectrum):
    d_x, _ = elements.d_delta
    n = vortex_spectrum.n_sites
    full = np.zeros((2 * n, 2 * n), dtype=complex)
    full[np.arange(n), np.arange(n) + n] = d_x
    full[np.arange(n) + n, np.arange(n)] = d_x.conj()
    states = vortex_spectrum.states
    assert np.allclose(states.conj().T @ full @ states, elements.mx, atol=1e-12)


def test_matches_matrix_derivative(clean_model, vortex, vortex_spectrum, elements):
    step = 0.01
    plus = assemble_bdg(clean_model, vortex.displace((0.0, step))).dense()
    minus = assemble_bdg(clean_model, vortex.displace((0.0, -step))).dense()
    states = vortex_spectrum.states
    numeric = states.conj().T @ ((plus - minus) / (2 * step)) @ states
    assert np.allclose(numeric, elements.my, atol=1e-12)


def test_c4_equivalence_of_components(elements, vortex_spectrum):
    """ Rotating the centered vortex by 90 degrees exchanges the two displacement directions """
    d_x, d_y = elements.d_delta
    assert np.sum(np.abs(d_x) ** 2) == pytest.approx(np.sum(np.abs(d_y) ** 2), rel=1e-10)
    for cluster in vortex_spectrum.clusters(1e-8):
        wx = np.sum(np.abs(elements.mx[cluster]) ** 2)
        wy = np.sum(np.abs(elements.my[cluster]) ** 2)
        assert wx == pytest.approx(wy, rel=1e-6, abs=1e-12)


def test_no_vortex_no_force(clean_model):
    pair = seed_pair_field(clean_model, q=0)
    spectrum = occupations(diagonalize(assemble_bdg(clean_model, pair)), np.inf)
    elements = force_matrix_elements(clean_model, pair, spectrum)
    assert elements.vanishes
    assert elements.hermiticity_error() == 0.0


def test_in_basis(elements):
    w = np.eye(elements.mx.shape[0])[::-1]
    rotated = elements.in_basis(w)
    assert np.allclose(rotated.mx, elements.mx[::-1, ::-1])
    assert np.allclose(rotated.isotropic_weight(), elements.isotropic_weight()[::-1, ::-1])


def test_pairing_block_of_zero_gradient(vortex_spectrum):
    zero = np.zeros(vortex_spectrum.n_sites)
    assert not np.any(pairing_block_elements(vortex_spectrum, zero))


def test_size_mismatch(vortex, vortex_spectrum):
    with pytest.raises(DomainError):
        force_matrix_elements(build_lattice(8, 8), vortex, vortex_spectrum)
