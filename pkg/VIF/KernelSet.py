"""
The kernel content of the effective vortex action: spectral function, damping kernel, transverse
coefficient and spring constant, with their persistence and the action they define
"""
import logging
import numpy as np
from pathlib import Path
from scipy.integrate import trapezoid
from typing import Optional, Union
# VIF imports
from VIF.SpectralFunction import JSamples
from VIF.DampingKernel import DampingSamples
from VIF.TransverseForce import TransverseResult
from VIF.SpringConstant import SpringResult
from VIF.ArtifactIO import write_table, read_table, write_json, read_json, as_float
from VIF.errors import DomainError, ContractViolation

logger = logging.getLogger(__name__)

SPECTRAL_FILE = 'spectral_function.csv'
DAMPING_FILE = 'damping_kernel.csv'
SCALARS_FILE = 'scalars.json'


class KernelSet:
    """
    Packaged kernels. The transverse kernel is stored as its long-time coefficient B: the transverse part of
    the action is (B / 2) int d tau z . (dx x d_tau dx).
    """

    def __init__(self,
                 omega_grid,
                 j_of_omega,
                 tau_grid,
                 f_parallel,
                 b_transverse: float,
                 k_spring: float,
                 beta: float,
                 metadata: Optional[dict] = None,
                 ):
        self.omega_grid = np.asarray(omega_grid, dtype=float)
        self.j_of_omega = np.asarray(j_of_omega, dtype=float)
        self.tau_grid = np.asarray(tau_grid, dtype=float)
        self.f_parallel = np.asarray(f_parallel, dtype=float)
        self.b_transverse = b_transverse
        self.k_spring = k_spring
        self.beta = float(beta)
        self.metadata = dict(metadata or {})

    def __repr__(self):
        return 'KernelSet(B={!r}, K={!r}, beta={}, omega points={}, tau points={})'.format(
            self.b_transverse, self.k_spring, self.beta, self.omega_grid.size, self.tau_grid.size)

    def __eq__(self, other):
        if not isinstance(other, KernelSet):
            return NotImplemented
        return (np.array_equal(self.omega_grid, other.omega_grid) and
                np.array_equal(self.j_of_omega, other.j_of_omega) and
                np.array_equal(self.tau_grid, other.tau_grid) and
                np.array_equal(self.f_parallel, other.f_parallel) and
                self.b_transverse == other.b_transverse and self.k_spring == other.k_spring and
                self.beta == other.beta and self.metadata == other.metadata)

    def check(self, tol: float = 1e-8):
        """
        Re-checks J >= 0, F(tau) = F(beta - tau) and that B is a real number

        Raises
        ------
        ContractViolation
            naming the broken property
        """
        if np.any(self.j_of_omega < 0):
            raise ContractViolation(f'J(omega) is negative at {np.sum(self.j_of_omega < 0)} points')
        if not isinstance(self.b_transverse, (float, int)) or isinstance(self.b_transverse, bool) \
                or not np.isfinite(self.b_transverse):
            raise ContractViolation(f'transverse coefficient {self.b_transverse!r} is not a finite real number')
        symmetry = DampingSamples(self.tau_grid, self.f_parallel, self.beta).symmetry_error()
        if symmetry > tol:
            raise ContractViolation(f'F(tau) violates F(tau) = F(beta - tau) by {symmetry:.2e}')

    """ Action """

    def effective_action(self, tau, path) -> dict:
        """
        Imaginary-time action of a discretized vortex path dx(tau)

        Parameters
        ----------
        tau : array-like
            ascending times inside the stored tau grid
        path : array-like
            displacements, shape (len(tau), 2)

        Returns
        -------
        dict
            'spring' = (K / 2) int |dx|^2,
            'damping' = (1 / 2) int d tau int_0^tau d tau' F(tau - tau') |dx(tau) - dx(tau')|^2,
            'transverse' = (B / 2) int z . (dx x d_tau dx), and their sum as 'total'
        """
        tau = np.asarray(tau, dtype=float)
        path = np.asarray(path, dtype=float)
        if path.shape != (tau.size, 2):
            raise DomainError(f'path shape {path.shape} does not match {tau.size} times')
        if tau.size < 2 or np.any(np.diff(tau) <= 0):
            raise DomainError('tau must be ascending with at least two samples')
        if tau[-1] - tau[0] > self.tau_grid[-1] * (1 + 1e-12):
            raise DomainError(f'path spans {tau[-1] - tau[0]}, beyond the stored kernel range {self.tau_grid[-1]}')

        spring = 0.5 * float(self.k_spring) * trapezoid(np.sum(path ** 2, axis=1), tau)

        lag = tau[:, None] - tau[None, :]
        kernel = np.where(lag >= 0, np.interp(np.abs(lag), self.tau_grid, self.f_parallel), 0.0)
        spread = np.sum((path[:, None, :] - path[None, :, :]) ** 2, axis=2)
        inner = np.array([trapezoid(kernel[i, :i + 1] * spread[i, :i + 1], tau[:i + 1]) if i else 0.0
                          for i in range(tau.size)])
        damping = 0.5 * trapezoid(inner, tau)

        velocity = np.gradient(path, tau, axis=0)
        cross = path[:, 0] * velocity[:, 1] - path[:, 1] * velocity[:, 0]
        transverse = 0.5 * float(self.b_transverse) * trapezoid(cross, tau)
        return {'spring': float(spring), 'damping': float(damping), 'transverse': float(transverse),
                'total': float(spring + damping + transverse)}

    """ Persistence """

    def to_directory(self, directory) -> list:
        """ Writes the kernel tables and scalars; returns the written paths """
        directory = Path(directory)
        paths = [
            write_table(directory / SPECTRAL_FILE, {'omega': self.omega_grid, 'J': self.j_of_omega},
                        units={'omega': 't/hbar', 'J': 't^2 hbar/a^2'}),
            write_table(directory / DAMPING_FILE, {'tau': self.tau_grid, 'F_parallel': self.f_parallel},
                        units={'tau': 'hbar/t', 'F_parallel': 't/a^2'}),
            write_json(directory / SCALARS_FILE, {'b_transverse': float(self.b_transverse),
                                                  'k_spring': float(self.k_spring),
                                                  'beta': self.beta,
                                                  'metadata': self.metadata}),
        ]
        return paths

    @classmethod
    def from_directory(cls, directory) -> 'KernelSet':
        directory = Path(directory)
        spectral = read_table(directory / SPECTRAL_FILE)
        damping = read_table(directory / DAMPING_FILE)
        scalars = read_json(directory / SCALARS_FILE)
        return cls(spectral['omega'], spectral['J'], damping['tau'], damping['F_parallel'],
                   as_float(scalars['b_transverse']), as_float(scalars['k_spring']), as_float(scalars['beta']),
                   scalars.get('metadata', {}))


def _scalar(value: Union[float, TransverseResult, SpringResult, None]) -> float:
    if value is None:
        return 0.0
    return float(value)


def assemble_action_kernels(k_spring, f_samples: DampingSamples, b_transverse, tau_grid=None,
                            jsamples: Optional[JSamples] = None, metadata: Optional[dict] = None) -> KernelSet:
    """
    Packages the kernels and re-checks their invariants

    Parameters
    ----------
    k_spring : float or SpringResult
        spring constant
    f_samples : DampingSamples
        damping kernel
    b_transverse : float or TransverseResult
        transverse coefficient
    tau_grid : array-like or None
        the grid the caller expects the damping kernel on; defaults to the kernel's own grid
    jsamples : JSamples or None
        spectral function; an empty J is stored when None
    metadata : dict or None
        broadening, temperature, disorder seed and any other bookkeeping

    Raises
    ------
    DomainError
        if tau_grid differs from the grid of f_samples
    """
    tau = f_samples.tau
    if tau_grid is not None:
        tau_grid = getattr(tau_grid, 'values', tau_grid)
        if not np.array_equal(np.asarray(tau_grid, dtype=float), tau):
            raise DomainError('tau grid does not match the grid of the damping kernel')
    metadata = dict(metadata or {})
    metadata['ir_singular'] = bool(f_samples.ir_singular)
    if jsamples is None:
        omega, values = np.zeros(0), np.zeros(0)
    else:
        omega, values = jsamples.omega, jsamples.values
        metadata.setdefault('eta_b', jsamples.eta_b)
        metadata.setdefault('total_weight', jsamples.total_weight)
    kernels = KernelSet(omega, values, tau, f_samples.values, _scalar(b_transverse), _scalar(k_spring),
                        f_samples.beta, metadata)
    kernels.check()
    return kernels
