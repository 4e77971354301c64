"""
Eigen-decomposition of the BdG matrix, Fermi occupations and the one-body observables built from them
"""
import logging
import numpy as np
import scipy.linalg
from scipy.special import expit
from typing import Optional, List
# VIF imports
from VIF.BdGMatrix import BdGMatrix
from VIF.errors import ContractViolation, NumericError, DomainError

logger = logging.getLogger(__name__)

# Components smaller than this fraction of a state's largest component do not count as its leading amplitude
LEADING_FLOOR = 1e-6


class BdGSpectrum:
    """
    Eigenpairs (E_k, Psi_k) of a BdG matrix, energies ascending, Psi_k stored as column k of `states`.
    `beta` and `occupations` are None until occupations() has been applied.
    """

    def __init__(self, energies, states, matrix: Optional[BdGMatrix] = None, beta=None, occupations=None):
        energies = np.asarray(energies, dtype=float)
        states = np.asarray(states, dtype=complex)
        if states.shape != (energies.size, energies.size) or energies.size % 2:
            raise DomainError(f'{energies.size} energies do not match states of shape {states.shape}')
        self._energies = energies
        self._states = states
        self._matrix = matrix
        self._beta = beta
        self._occupations = None if occupations is None else np.asarray(occupations, dtype=float)
        for arr in (self._energies, self._states, self._occupations):
            if arr is not None:
                arr.setflags(write=False)

    def __len__(self):
        return self._energies.size

    def __repr__(self):
        return 'BdGSpectrum(dimension={}, beta={})'.format(len(self), self.beta)

    @property
    def energies(self) -> np.ndarray:
        return self._energies

    @property
    def states(self) -> np.ndarray:
        return self._states

    @property
    def matrix(self) -> Optional[BdGMatrix]:
        return self._matrix

    @property
    def beta(self):
        return self._beta

    @property
    def occupations(self) -> Optional[np.ndarray]:
        return self._occupations

    @property
    def n_sites(self) -> int:
        return len(self) // 2

    @property
    def u(self) -> np.ndarray:
        """ Particle components, shape (N, 2N) """
        return self._states[:self.n_sites]

    @property
    def v(self) -> np.ndarray:
        """ Hole components, shape (N, 2N) """
        return self._states[self.n_sites:]

    @property
    def energy_scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self._energies))))

    def require_occupations(self) -> np.ndarray:
        if self._occupations is None:
            raise DomainError('spectrum has no occupations; call occupations(spectrum, beta) first')
        return self._occupations

    def with_states(self, states) -> 'BdGSpectrum':
        """ Same energies and occupations, new eigenvector basis (used for gauge/basis tests) """
        return BdGSpectrum(self._energies, states, self._matrix, self._beta, self._occupations)

    def clusters(self, tol: float) -> List[np.ndarray]:
        """
        Groups of consecutive state indices whose neighboring energies differ by at most `tol`

        Returns
        -------
        list of np.ndarray
            index arrays covering 0 .. 2N-1 in order
        """
        breaks = np.nonzero(np.diff(self._energies) > tol)[0] + 1
        return np.split(np.arange(len(self)), breaks)

    def cluster_labels(self, tol: float) -> np.ndarray:
        """ Cluster number of every state, see clusters() """
        return np.concatenate([[0], np.cumsum(np.diff(self._energies) > tol)])

    """ Invariant checks """

    def orthonormality_error(self) -> float:
        gram = self._states.conj().T @ self._states
        return float(np.max(np.abs(gram - np.eye(len(self)))))

    def residual(self) -> float:
        """ max_k || M Psi_k - E_k Psi_k || """
        if self._matrix is None:
            raise DomainError('spectrum was built without its matrix')
        r = self._matrix.dense() @ self._states - self._states * self._energies
        return float(np.max(np.linalg.norm(r, axis=0)))

    def particle_hole_error(self) -> float:
        """ max_k |E_k + E_{2N-1-k}| """
        return float(np.max(np.abs(self._energies + self._energies[::-1])))


def _fix_gauge(energies: np.ndarray, states: np.ndarray, degeneracy_tol: float):
    """
    Rotates every eigenvector so that its leading component (first one above LEADING_FLOOR of the column
    maximum) is real and positive, then orders the states of each degenerate cluster by the position of that
    component. The energies keep the ascending order of the solver
    """
    magnitude = np.abs(states)
    significant = magnitude > LEADING_FLOOR * magnitude.max(axis=0)
    leading = np.argmax(significant, axis=0)
    cols = np.arange(states.shape[1])
    lead = states[leading, cols]
    states = states * (np.abs(lead) / lead)[None, :]

    order = cols.copy()
    breaks = np.nonzero(np.diff(energies) > degeneracy_tol)[0] + 1
    for cluster in np.split(cols, breaks):
        if cluster.size > 1:
            key = np.lexsort((-np.abs(lead[cluster]), leading[cluster]))
            order[cluster] = cluster[key]
    return energies, states[:, order]


def diagonalize(matrix: BdGMatrix, hermitian_tol: float = 1e-12, degeneracy_tol: float = 1e-10) -> BdGSpectrum:
    """
    Full dense eigen-decomposition of a BdG matrix

    Parameters
    ----------
    matrix : BdGMatrix
        matrix to diagonalize
    hermitian_tol : float
        allowed max |M - M^H| relative to the energy scale
    degeneracy_tol : float
        energies closer than this (relative to the energy scale) are ordered as one degenerate cluster

    Returns
    -------
    BdGSpectrum
        energies ascending; each eigenvector phase-fixed so its leading component is real positive;
        degenerate clusters ordered by the site index of that component

    Raises
    ------
    ContractViolation
        if the matrix is not Hermitian
    NumericError
        if the eigensolver does not converge
    """
    scale = matrix.energy_scale
    herm = matrix.hermiticity_error()
    if herm >= hermitian_tol * scale:
        raise ContractViolation(f'BdG matrix is not Hermitian: max |M - M^H| = {herm:.3e}')
    dense = matrix.dense()
    try:
        energies, states = scipy.linalg.eigh(dense)
    except (np.linalg.LinAlgError, ValueError) as exc:
        try:
            cond = float(np.linalg.cond(dense))
        except np.linalg.LinAlgError:
            cond = float('inf')
        raise NumericError(f'eigensolver failed on a {matrix.dimension}x{matrix.dimension} matrix: {exc}',
                           diagnostics={'condition': cond, 'dimension': matrix.dimension,
                                        'max_abs': float(np.max(np.abs(dense)))}) from exc
    energies, states = _fix_gauge(energies, states, degeneracy_tol * scale)
    logger.debug(f'Diagonalized {matrix.dimension}x{matrix.dimension} BdG matrix, '
                 f'E in [{energies[0]:.6g}, {energies[-1]:.6g}]')
    return BdGSpectrum(energies, states, matrix=matrix)


def fermi(energies, beta) -> np.ndarray:
    """ 1 / (1 + exp(beta E)), evaluated without overflow; beta = inf gives the step with f(0) = 1/2 """
    energies = np.asarray(energies, dtype=float)
    if np.isinf(beta):
        return np.where(energies < 0, 1.0, np.where(energies > 0, 0.0, 0.5))
    return expit(-beta * energies)


def occupations(spectrum: BdGSpectrum, beta) -> BdGSpectrum:
    """
    Populates the Fermi occupations f_k = 1 / (1 + exp(beta E_k))

    Raises
    ------
    DomainError
        if beta is not > 0 (beta = inf is allowed)
    """
    beta = float(beta)
    if not beta > 0:
        raise DomainError(f'beta = {beta} must be > 0 or inf')
    f = fermi(spectrum.energies, beta)
    return BdGSpectrum(spectrum.energies, spectrum.states, spectrum.matrix, beta, f)


def quasiparticle_density(spectrum: BdGSpectrum) -> np.ndarray:
    """
    One-body electron density per site,

        n(x) = sum_k [ f_k |u_k(x)|^2 + (1 - f_k) |v_k(x)|^2 ]

    over all 2N states; by particle-hole pairing this equals twice the same sum over E_k > 0
    """
    f = spectrum.require_occupations()
    return np.abs(spectrum.u) ** 2 @ f + np.abs(spectrum.v) ** 2 @ (1 - f)


def mean_density(spectrum: BdGSpectrum, area: float) -> float:
    """ Mean areal density n̄ = sum_x n(x) / area """
    return float(np.sum(quasiparticle_density(spectrum)) / area)


def subgap_states(spectrum: BdGSpectrum, bulk_gap: float) -> np.ndarray:
    """ Positive energies below `bulk_gap` (vortex core states) """
    e = spectrum.energies
    return e[(e > 0) & (e < bulk_gap)]


def check_particle_hole(spectrum: BdGSpectrum, tol: float = 1e-8) -> bool:
    """
    Energies pair up as E_k = -E_{2N-1-k}, and the partner of every state, (-v*, u*), lies in the
    eigenspace at -E_k
    """
    if spectrum.particle_hole_error() > tol * spectrum.energy_scale:
        return False
    partner = np.concatenate([-spectrum.v.conj(), spectrum.u.conj()])
    labels = spectrum.cluster_labels(tol * spectrum.energy_scale)
    mirrored = labels[::-1]
    states = spectrum.states
    for label in np.unique(labels):
        here = np.nonzero(labels == label)[0]
        there = np.nonzero(labels == mirrored[here[0]])[0]
        proj = states[:, there].conj().T @ partner[:, here]
        captured = np.sum(np.abs(proj) ** 2, axis=0)
        if np.any(np.abs(captured - 1) > np.sqrt(tol)):
            return False
    return True
