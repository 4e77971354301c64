"""
test_kernel_set.py

Unit tests for the packaged action kernels: invariant checks, persistence and the action of simple paths.
"""
import numpy as np
import pytest
from VIF.DampingKernel import DampingSamples, damping_kernel, default_tau_grid
from VIF.KernelSet import KernelSet, assemble_action_kernels
from VIF.SpectralFunction import spectral_function
from VIF.TransverseForce import TransverseResult
from VIF.SpringConstant import SpringResult
from VIF.errors import ContractViolation, DomainError
from tests.helpers import two_level


@pytest.fixture
def two_level_kernels():
    elements, spectrum = two_level(m0=0.3, gap=2.0, beta=10.0)
    j = spectral_function(elements, spectrum, np.linspace(0.0, 6.0, 1201), 0.05)
    tau = default_tau_grid(10.0, count=101)
    f = damping_kernel(j, tau, 10.0, method='lines')
    return assemble_action_kernels(SpringResult(1.0, 0.2, 0.18), f, TransverseResult(0.7, 'virtual', [0.7]),
                                   tau_grid=tau, jsamples=j, metadata={'seed': 3})


def flat_kernels(b=0.0, k=0.0, f_value=0.0):
    tau = np.linspace(0.0, 5.0, 51)
    return KernelSet(np.linspace(0.0, 1.0, 5), np.zeros(5), tau, np.full(tau.size, f_value), b, k, np.inf)


def test_assembly_unwraps_results(two_level_kernels):
    kernels = two_level_kernels
    assert kernels.b_transverse == 0.7
    assert kernels.k_spring == pytest.approx(0.8)
    assert kernels.beta == 10.0
    assert kernels.metadata['seed'] == 3
    assert kernels.metadata['eta_b'] == 0.05
    assert kernels.metadata['ir_singular'] is False
    assert kernels.metadata['total_weight'] == pytest.approx(np.pi * 0.09 * np.tanh(10.0 / 2))


def test_round_trip_through_directory(two_level_kernels, tmp_path):
    paths = two_level_kernels.to_directory(tmp_path / 'kernels')
    assert [p.name for p in paths] == ['spectral_function.csv', 'damping_kernel.csv', 'scalars.json']
    assert KernelSet.from_directory(tmp_path / 'kernels') == two_level_kernels


def test_round_trip_keeps_infinite_beta(tmp_path):
    kernels = flat_kernels(b=1.5, k=0.25, f_value=0.1)
    kernels.to_directory(tmp_path)
    loaded = KernelSet.from_directory(tmp_path)
    assert np.isinf(loaded.beta)
    assert loaded == kernels


def test_assembly_rejects_foreign_tau_grid():
    tau = np.linspace(0.0, 1.0, 11)
    f = DampingSamples(tau, np.zeros(11), np.inf)
    with pytest.raises(DomainError):
        assemble_action_kernels(0.0, f, 0.0, tau_grid=np.linspace(0.0, 1.0, 12))


def test_assembly_without_spectral_function():
    f = DampingSamples(np.linspace(0.0, 1.0, 11), np.zeros(11), np.inf, ir_singular=True)
    kernels = assemble_action_kernels(None, f, None)
    assert kernels.omega_grid.size == 0
    assert kernels.b_transverse == 0.0 and kernels.k_spring == 0.0
    assert kernels.metadata == {'ir_singular': True}


def test_check_rejects_negative_j():
    kernels = flat_kernels()
    kernels.j_of_omega[2] = -1e-3
    with pytest.raises(ContractViolation):
        kernels.check()


@pytest.mark.parametrize('b', [np.nan, np.inf, 1 + 1j, True])
def test_check_rejects_non_real_b(b):
    with pytest.raises(ContractViolation):
        flat_kernels(b=b).check()


def test_check_rejects_asymmetric_damping():
    tau = np.linspace(0.0, 2.0, 21)
    kernels = KernelSet(np.zeros(1), np.zeros(1), tau, np.exp(-tau), 0.0, 0.0, 2.0)
    with pytest.raises(ContractViolation):
        kernels.check()
    symmetric = KernelSet(np.zeros(1), np.zeros(1), tau, np.cosh(tau - 1.0), 0.0, 0.0, 2.0)
    symmetric.check()


def test_static_path_costs_only_spring_energy():
    kernels = flat_kernels(b=2.0, k=0.5, f_value=0.3)
    tau = np.linspace(0.0, 2.0, 201)
    path = np.tile([1.0, -1.0], (tau.size, 1))
    action = kernels.effective_action(tau, path)
    assert action['spring'] == pytest.approx(0.5 * 0.5 * 2.0 * 2.0)
    assert action['damping'] == 0.0
    assert action['transverse'] == pytest.approx(0.0, abs=1e-14)
    assert action['total'] == pytest.approx(action['spring'])


@pytest.mark.parametrize('b', [1.0, -1.0])
def test_circular_path_picks_up_transverse_action(b):
    kernels = flat_kernels(b=b)
    tau = np.linspace(0.0, 2.0, 401)
    radius, omega = 0.5, 1.0
    path = radius * np.column_stack([np.cos(omega * tau), np.sin(omega * tau)])
    action = kernels.effective_action(tau, path)
    assert action['transverse'] == pytest.approx(0.5 * b * radius ** 2 * omega * 2.0, rel=1e-4)


def test_linear_path_damping_with_flat_kernel():
    kernels = flat_kernels(f_value=0.3)
    tau = np.linspace(0.0, 2.0, 401)
    path = np.column_stack([tau, np.zeros_like(tau)])
    action = kernels.effective_action(tau, path)
    assert action['damping'] == pytest.approx(0.3 * 2.0 ** 4 / 24, rel=1e-3)


@pytest.mark.parametrize('tau, path', [
    (np.linspace(0.0, 1.0, 5), np.zeros((4, 2))),
    (np.array([0.0, 0.5, 0.5]), np.zeros((3, 2))),
    (np.linspace(0.0, 6.0, 7), np.zeros((7, 2))),
])
def test_action_domain(tau, path):
    with pytest.raises(DomainError):
        flat_kernels().effective_action(tau, path)
