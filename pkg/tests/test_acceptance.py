"""
test_acceptance.py

Desk-scale checks of the full pipeline on the default 24x24 clean vortex and a disorder ensemble.
"""
import math
import numpy as np
import pytest
from VIF.RunConfig import RunConfig
from VIF.RunManager import RunManager, solve, compute_kernels
from VIF.BdGMatrix import assemble_bdg
from VIF.Spectrum import diagonalize, occupations, subgap_states, check_particle_hole
from VIF.PairField import default_loop, winding_number
from VIF.SelfConsistency import thermodynamic_potential
from VIF.XY import XY

pytestmark = pytest.mark.slow


@pytest.fixture(scope='module')
def clean_run():
    config = RunConfig.from_dict({})
    solution = solve(config)
    kernels = compute_kernels(config, solution.model, solution.pair, solution.spectrum)
    return config, solution, kernels


def test_converged_vortex(clean_run):
    config, solution, _ = clean_run
    assert solution.report.converged
    assert winding_number(solution.pair, default_loop(solution.pair)) == 1
    assert check_particle_hole(solution.spectrum)
    bulk = float(np.max(np.abs(solution.pair.delta)))
    assert subgap_states(solution.spectrum, bulk).size > 0


def test_transverse_routes_agree(clean_run):
    _, _, kernels = clean_run
    assert kernels.b_state is not None
    assert kernels.b_state.b == pytest.approx(kernels.b_virtual.b, rel=2e-2)
    assert kernels.b_state.quasiparticle_part == pytest.approx(kernels.b_virtual.quasiparticle_part,
                                                               rel=2e-2, abs=1e-6)
    assert kernels.b_state.remainder == pytest.approx(kernels.b_virtual.remainder, rel=2e-2)


def test_transverse_coefficient_is_topological(clean_run):
    _, solution, kernels = clean_run
    assert kernels.b_virtual.b == pytest.approx(math.pi * solution.pair.winding * kernels.mean_density, rel=0.1)


def test_spectral_sum_rule_on_vortex(clean_run):
    _, _, kernels = clean_run
    assert np.all(kernels.jsamples.values >= 0)
    assert kernels.jsamples.integrated_weight() == pytest.approx(kernels.jsamples.total_weight, rel=1e-6)


def test_spring_constant_matches_energy_curvature(clean_run):
    config, solution, kernels = clean_run
    model, pair = solution.model, solution.pair
    g, cutoff, beta = config.pairing.g, config.pairing.cutoff, config.temperature.beta

    def potential(shift):
        moved = pair.displace(XY(shift))
        spectrum = occupations(diagonalize(assemble_bdg(model, moved)), beta)
        return thermodynamic_potential(model, moved, spectrum, g, cutoff)

    eps = 0.1
    center = potential((0.0, 0.0))
    laplacian = sum(potential(s) for s in ((eps, 0.0), (-eps, 0.0), (0.0, eps), (0.0, -eps))) - 4 * center
    assert kernels.spring.k == pytest.approx(laplacian / eps ** 2 / 2, rel=0.15)


def test_decoupling_over_disorder_ensemble(tmp_path):
    config = RunConfig.from_dict({'disorder': {'strength': 0.5, 'seed': 1, 'ensemble_size': 8},
                                  'pairing': {'pin_phase': True},
                                  'numerics': {'state_route': False}})
    summary = RunManager(config, tmp_path).run_flow('sweep')
    assert summary['failed'] == 0
    assert summary['b']['relative_spread'] < 0.05
    assert summary['eta']['relative_spread'] > 0.20
    assert summary['decoupling'] == 'confirmed'
