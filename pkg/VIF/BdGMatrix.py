import numpy as np
import scipy.sparse as sp
from typing import Optional
# VIF imports
from VIF.LatticeModel import LatticeModel
from VIF.PairField import PairField
from VIF.errors import DomainError


class BdGMatrix:
    """
    Bogoliubov-de Gennes matrix of a lattice with a site-diagonal pair field,

        M = [[ H,        diag(Delta) ],
             [ diag(Delta*),   -H*   ]]

    acting on Nambu spinors (u_1..u_N, v_1..v_N). H is real here, so -H* = -H.
    """

    def __init__(self, h, delta, model: Optional[LatticeModel] = None):
        """
        Parameters
        ----------
        h : array-like or scipy sparse matrix
            N x N normal-state block
        delta : array-like
            N complex pair-field values
        model : LatticeModel or None
            lattice the blocks were built from, if any
        """
        h = sp.csr_matrix(h)
        delta = np.asarray(delta, dtype=complex).ravel()
        if h.shape[0] != h.shape[1] or h.shape[0] != delta.size:
            raise DomainError(f'normal block {h.shape} does not match {delta.size} pair-field values')
        self._h = h
        self._delta = delta
        self._model = model
        self._dense = None

    @property
    def n_sites(self) -> int:
        return self._delta.size

    @property
    def dimension(self) -> int:
        return 2 * self.n_sites

    @property
    def h(self) -> sp.csr_matrix:
        return self._h

    @property
    def delta(self) -> np.ndarray:
        return self._delta

    @property
    def model(self) -> Optional[LatticeModel]:
        return self._model

    @property
    def energy_scale(self) -> float:
        """ Max-norm of the matrix, floored at 1 so that tolerances stay absolute for tiny problems """
        return max(1.0, float(np.max(np.abs(self.dense()))))

    def dense(self) -> np.ndarray:
        """ The full 2N x 2N complex matrix """
        if self._dense is None:
            n = self.n_sites
            h = self._h.toarray()
            m = np.zeros((2 * n, 2 * n), dtype=complex)
            m[:n, :n] = h
            m[n:, n:] = -h.conj()
            idx = np.arange(n)
            m[idx, idx + n] = self._delta
            m[idx + n, idx] = self._delta.conj()
            m.setflags(write=False)
            self._dense = m
        return self._dense

    def hermiticity_error(self) -> float:
        m = self.dense()
        return float(np.max(np.abs(m - m.conj().T)))

    def particle_hole_residual(self) -> float:
        """
        Max-norm of P M P^-1 + M for the antiunitary P = (i sigma_y (x) 1) K, which maps an
        eigenpair (E, (u, v)) onto (-E, (-v*, u*))
        """
        m = self.dense()
        n = self.n_sites
        mc = m.conj()
        conjugated = np.empty_like(m)
        conjugated[:n, :n] = mc[n:, n:]
        conjugated[:n, n:] = -mc[n:, :n]
        conjugated[n:, :n] = -mc[:n, n:]
        conjugated[n:, n:] = mc[:n, :n]
        return float(np.max(np.abs(conjugated + m)))


def assemble_bdg(model: LatticeModel, pair: PairField) -> BdGMatrix:
    """
    Assembles the BdG matrix of `model` with pair field `pair`

    Raises
    ------
    DomainError
        if the pair field lives on a different lattice
    """
    if pair.site_shape != model.site_shape:
        raise DomainError(f'pair field shape {pair.site_shape} does not match lattice {model.site_shape}')
    return BdGMatrix(model.hamiltonian(), pair.delta, model=model)


def check_hermitian(matrix: BdGMatrix, tol: float = 1e-12) -> bool:
    return matrix.hermiticity_error() < tol * matrix.energy_scale


def particle_hole_residual(matrix: BdGMatrix) -> float:
    return matrix.particle_hole_residual()
