"""
test_self_consistency.py

Unit tests for the gap-equation iteration, checked against the scalar gap condition of the uniform system.
"""
import numpy as np
import pytest
from VIF.LatticeModel import build_lattice
from VIF.PairField import PairField, seed_pair_field, default_loop, winding_number
from VIF.SelfConsistency import (SelfConsistencyReport, self_consistent_gap, homogeneous_gap,
                                 thermodynamic_potential, gap_update)
from VIF.BdGMatrix import assemble_bdg
from VIF.Spectrum import diagonalize, occupations
from VIF.Disorder import DisorderSpec
from VIF.errors import DomainError, TopologyError


@pytest.fixture(scope='module')
def uniform_model():
    return build_lattice(8, 8, boundary='periodic')


@pytest.fixture(scope='module')
def uniform_solution(uniform_model):
    seed = seed_pair_field(uniform_model, q=0, bulk_gap=0.6)
    return self_consistent_gap(uniform_model, seed, g=2.5, cutoff=4.0, tol=1e-10, max_iter=500)


def test_uniform_gap_matches_scalar_condition(uniform_model, uniform_solution):
    pair, spectrum, report = uniform_solution
    assert report.converged
    expected = homogeneous_gap(uniform_model, g=2.5, cutoff=4.0)
    assert expected > 0
    assert np.allclose(pair.delta, expected, atol=1e-6)


def test_converged_field_is_fixed_point(uniform_solution):
    pair, spectrum, report = uniform_solution
    new = gap_update(spectrum, 2.5, 4.0)
    assert np.max(np.abs(new - pair.delta)) == pytest.approx(report.final_residual)
    assert report.final_residual < 1e-10


def test_uniform_gap_minimizes_grand_potential(uniform_model, uniform_solution):
    pair = uniform_solution[0]
    gap = float(np.abs(pair.delta[0]))

    def potential(value):
        field = pair.with_delta(np.full(uniform_model.n_sites, value, dtype=complex))
        spectrum = occupations(diagonalize(assemble_bdg(uniform_model, field)), np.inf)
        return thermodynamic_potential(uniform_model, field, spectrum, 2.5, 4.0)

    assert potential(gap) < potential(gap - 0.05)
    assert potential(gap) < potential(gap + 0.05)


def test_grand_potential_is_stationary_at_the_gap(uniform_model, uniform_solution):
    pair = uniform_solution[0]
    gap = float(np.abs(pair.delta[0]))

    def potential(value):
        field = pair.with_delta(np.full(uniform_model.n_sites, value, dtype=complex))
        spectrum = occupations(diagonalize(assemble_bdg(uniform_model, field)), np.inf)
        return thermodynamic_potential(uniform_model, field, spectrum, 2.5, 4.0)

    h = 1e-4
    slope = (potential(gap + h) - potential(gap - h)) / (2 * h)
    curvature = (potential(gap + h) - 2 * potential(gap) + potential(gap - h)) / h ** 2
    assert curvature > 0
    assert abs(slope) < 1e-4 * curvature


def test_homogeneous_gap_without_root():
    model = build_lattice(8, 8, mu=0.1, boundary='periodic')
    assert homogeneous_gap(model, g=0.01) == 0.0


def test_finite_temperature_reduces_gap(uniform_model):
    assert homogeneous_gap(uniform_model, 2.5, beta=5.0) < homogeneous_gap(uniform_model, 2.5)


def test_vortex_keeps_its_winding():
    model = build_lattice(12, 12)
    seed = seed_pair_field(model, q=1, bulk_gap=0.6, xi=2.0)
    pair, spectrum, report = self_consistent_gap(model, seed, g=2.5, tol=1e-5, max_iter=400)
    assert report.converged
    assert winding_number(pair, default_loop(pair)) == 1
    # the core spans about one lattice spacing at g = 2.5
    assert np.abs(pair.delta).min() < 0.85 * np.abs(pair.delta).max()
    assert pair.center == seed.center


def test_report_bookkeeping(uniform_model):
    seed = seed_pair_field(uniform_model, q=0, bulk_gap=0.1)
    pair, spectrum, report = self_consistent_gap(uniform_model, seed, g=2.5, tol=1e-12, max_iter=3)
    assert report.iterations == 3
    assert not report.converged
    assert len(report.to_dict()['residual_history']) == 3
    assert spectrum.occupations is not None


def test_report_converged_iff_below_tolerance():
    report = SelfConsistencyReport(2.5, 4.0, 1e-6, 0.5)
    assert not report.converged
    report.record(1e-3)
    assert not report.converged
    report.record(1e-7)
    assert report.converged
    assert report.iterations == 2


def test_winding_flip_raises():
    model = build_lattice(12, 12)
    antivortex = seed_pair_field(model, q=-1)
    mislabeled = PairField(model, antivortex.delta, antivortex.center, 1, 0.6, 2.0)
    with pytest.raises(TopologyError) as info:
        self_consistent_gap(model, mislabeled, g=2.5, max_iter=5)
    assert info.value.diagnostics['iteration'] == 1


@pytest.mark.parametrize('kwargs', [dict(g=0.0), dict(g=2.5, mixing=0.0), dict(g=2.5, tol=0.0),
                                    dict(g=2.5, max_iter=0), dict(g=2.5, cutoff=-1.0)])
def test_iteration_domain(uniform_model, kwargs):
    seed = seed_pair_field(uniform_model, q=0)
    with pytest.raises(DomainError):
        self_consistent_gap(uniform_model, seed, **kwargs)


def test_pinned_phase_keeps_disordered_vortex():
    model = build_lattice(8, 8, disorder=DisorderSpec(strength=0.5, seed=100))
    seed = seed_pair_field(model, q=1, bulk_gap=0.6, xi=2.0)
    pair, spectrum, report = self_consistent_gap(model, seed, g=2.5, tol=1e-5, max_iter=400, pin_phase=True)
    assert report.converged
    assert report.to_dict()['pin_phase'] is True
    assert winding_number(pair, default_loop(pair)) == 1
    assert np.allclose((pair.delta * np.exp(-1j * np.angle(seed.delta))).imag, 0.0, atol=1e-12)
    assert pair.center == seed.center


def test_pinned_phase_leaves_uniform_solution(uniform_model, uniform_solution):
    seed = seed_pair_field(uniform_model, q=0, bulk_gap=0.6)
    pinned = self_consistent_gap(uniform_model, seed, g=2.5, cutoff=4.0, tol=1e-10, max_iter=500, pin_phase=True)[0]
    assert np.allclose(pinned.delta, uniform_solution[0].delta, atol=1e-8)
