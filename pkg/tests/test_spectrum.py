"""
test_spectrum.py

Unit tests for the BdG eigen-decomposition, its gauge fixing and the occupations built on it.
"""
import numpy as np
import pytest
from VIF.LatticeModel import build_lattice
from VIF.PairField import seed_pair_field
from VIF.BdGMatrix import BdGMatrix, assemble_bdg
from VIF.Spectrum import (BdGSpectrum, diagonalize, occupations, fermi, quasiparticle_density, mean_density,
                          subgap_states, check_particle_hole)
from VIF.errors import ContractViolation, DomainError


def test_energies_pair_up(vortex_spectrum):
    e = vortex_spectrum.energies
    assert np.all(np.diff(e) >= 0)
    assert vortex_spectrum.particle_hole_error() < 1e-8
    assert check_particle_hole(vortex_spectrum)


def test_eigenpairs(vortex_spectrum):
    assert vortex_spectrum.orthonormality_error() < 1e-10
    assert vortex_spectrum.residual() < 1e-10


def test_gauge_fixing(vortex_spectrum):
    states = vortex_spectrum.states
    magnitude = np.abs(states)
    leading = np.argmax(magnitude > 1e-6 * magnitude.max(axis=0), axis=0)
    lead = states[leading, np.arange(states.shape[1])]
    assert np.allclose(lead.imag, 0.0, atol=1e-14)
    assert np.all(lead.real > 0)


def test_degenerate_clusters_keep_energies_sorted(clean_model):
    spectrum = diagonalize(assemble_bdg(clean_model, seed_pair_field(clean_model, q=0)))
    e = spectrum.energies
    assert np.all(np.diff(e) >= 0)
    assert spectrum.residual() < 1e-10
    magnitude = np.abs(spectrum.states)
    leading = np.argmax(magnitude > 1e-6 * magnitude.max(axis=0), axis=0)
    degenerate = [c for c in spectrum.clusters(1e-12) if c.size > 1]
    assert degenerate
    for cluster in degenerate:
        assert np.all(np.diff(leading[cluster]) >= 0)


def test_diagonalization_is_deterministic(clean_model, vortex):
    first = diagonalize(assemble_bdg(clean_model, vortex))
    second = diagonalize(assemble_bdg(clean_model, vortex))
    assert np.array_equal(first.energies, second.energies)
    assert np.array_equal(first.states, second.states)


def test_non_hermitian_rejected():
    h = np.triu(np.ones((4, 4)))
    with pytest.raises(ContractViolation):
        diagonalize(BdGMatrix(h, np.zeros(4)))


def test_zero_temperature_occupations(vortex_spectrum):
    f = vortex_spectrum.occupations
    e = vortex_spectrum.energies
    assert np.all(f[e < 0] == 1.0)
    assert np.all(f[e > 0] == 0.0)
    assert vortex_spectrum.beta == np.inf


def test_fermi_function():
    assert fermi([0.0], np.inf)[0] == 0.5
    assert fermi([0.0], 3.0)[0] == pytest.approx(0.5)
    big = fermi([-1e4, 1e4], 1e3)
    assert np.all(np.isfinite(big))
    assert big[0] == pytest.approx(1.0)
    assert big[1] == 0.0


@pytest.mark.parametrize('beta', [0.0, -1.0])
def test_beta_domain(vortex_spectrum, beta):
    with pytest.raises(DomainError):
        occupations(vortex_spectrum, beta)


def test_occupations_required():
    bare = BdGSpectrum([-1.0, 1.0], np.eye(2))
    with pytest.raises(DomainError):
        quasiparticle_density(bare)


def test_normal_state_density_counts_filled_levels():
    model = build_lattice(8, 6, mu=0.1)
    pair = seed_pair_field(model, q=0, bulk_gap=0.0)
    spectrum = occupations(diagonalize(assemble_bdg(model, pair)), np.inf)
    filled = np.sum(model.stencil_energies() < 0)
    assert mean_density(spectrum, model.area) == pytest.approx(2 * filled / model.n_sites, rel=1e-10)


def test_density_sum_over_positive_half(vortex_spectrum):
    density = quasiparticle_density(vortex_spectrum)
    f = vortex_spectrum.occupations
    positive = vortex_spectrum.energies > 0
    half = np.abs(vortex_spectrum.u[:, positive]) ** 2 @ f[positive] + \
        np.abs(vortex_spectrum.v[:, positive]) ** 2 @ (1 - f[positive])
    assert np.allclose(density, 2 * half, atol=1e-10)


def test_vortex_binds_core_states(vortex_spectrum):
    core = subgap_states(vortex_spectrum, 0.6)
    assert core.size > 0
    assert np.all((core > 0) & (core < 0.6))


def test_clusters_cover_every_state(vortex_spectrum):
    clusters = vortex_spectrum.clusters(1e-8)
    assert np.array_equal(np.concatenate(clusters), np.arange(len(vortex_spectrum)))
    labels = vortex_spectrum.cluster_labels(1e-8)
    assert labels[-1] == len(clusters) - 1
