import logging
import numpy as np
# VIF imports
from VIF.LatticeModel import LatticeModel
from VIF.PairField import PairField
from VIF.Spectrum import BdGSpectrum
from VIF.errors import DomainError, NumericError

logger = logging.getLogger(__name__)


class ForceMatrixElements:
    """
    Matrix elements (M^a)_{kk'} = <Psi_k| d H_BdG / d x0_a |Psi_k'> of the vortex-displacement force, a in {x, y}.
    Only the pair-field blocks depend on the vortex center, so

        M^a = U^H diag(d_a Delta) V + V^H diag(d_a Delta*) U
    """

    def __init__(self, mx, my, fd_step: float, d_delta):
        self.mx = np.asarray(mx, dtype=complex)
        self.my = np.asarray(my, dtype=complex)
        self.fd_step = float(fd_step)
        self.d_delta = tuple(np.asarray(d, dtype=complex) for d in d_delta)

    def __repr__(self):
        return 'ForceMatrixElements(dimension={}, fd_step={})'.format(self.mx.shape[0], self.fd_step)

    @property
    def vanishes(self) -> bool:
        return not (np.any(self.mx) or np.any(self.my))

    def hermiticity_error(self) -> float:
        """ Largest |M - M^H| relative to max |M| over both components """
        scale = max(np.max(np.abs(self.mx)), np.max(np.abs(self.my)))
        if scale == 0:
            return 0.0
        err = max(np.max(np.abs(self.mx - self.mx.conj().T)), np.max(np.abs(self.my - self.my.conj().T)))
        return float(err / scale)

    def isotropic_weight(self) -> np.ndarray:
        """ (|M^x|^2 + |M^y|^2) / 2 for every state pair """
        return 0.5 * (np.abs(self.mx) ** 2 + np.abs(self.my) ** 2)

    def in_basis(self, rotation) -> 'ForceMatrixElements':
        """ Elements in the eigenbasis rotated by the unitary `rotation` (columns of new states) """
        w = np.asarray(rotation)
        return ForceMatrixElements(w.conj().T @ self.mx @ w, w.conj().T @ self.my @ w, self.fd_step, self.d_delta)


def pairing_block_elements(spectrum: BdGSpectrum, d_delta) -> np.ndarray:
    """ U^H diag(dDelta) V + V^H diag(dDelta*) U """
    u, v = spectrum.u, spectrum.v
    d_delta = np.asarray(d_delta)
    return u.conj().T @ (d_delta[:, None] * v) + v.conj().T @ (d_delta.conj()[:, None] * u)


def force_matrix_elements(model: LatticeModel, pair: PairField, spectrum: BdGSpectrum, fd_step: float = 0.01,
                          hermitian_tol: float = 1e-8) -> ForceMatrixElements:
    """
    Matrix elements of the center gradient of the BdG matrix in the eigenbasis of `spectrum`

    Parameters
    ----------
    model : LatticeModel
        lattice the pair field lives on
    pair : PairField
        converged pair field
    spectrum : BdGSpectrum
        its eigen-decomposition
    fd_step : float
        step of the central difference of displace_pair_field, in lattice units
    hermitian_tol : float
        allowed relative deviation of M from Hermiticity

    Raises
    ------
    DomainError
        if pair and spectrum do not match the lattice, or the step pushes the vortex out of its domain
    NumericError
        if the elements are not Hermitian within `hermitian_tol`
    """
    if pair.site_shape != model.site_shape or spectrum.n_sites != model.n_sites:
        raise DomainError('pair field, spectrum and lattice sizes do not match')
    step = fd_step * model.a
    d_x, d_y = pair.center_gradient(step)
    mx = pairing_block_elements(spectrum, d_x)
    my = pairing_block_elements(spectrum, d_y)
    elements = ForceMatrixElements(mx, my, step, (d_x, d_y))
    err = elements.hermiticity_error()
    if err > hermitian_tol:
        raise NumericError(f'force matrix elements deviate from Hermiticity by {err:.2e}; reduce fd_step',
                           diagnostics={'hermiticity_error': err, 'fd_step': step})
    logger.debug(f'Force matrix elements at fd_step={step}: max |M| = '
                 f'{max(np.max(np.abs(mx)), np.max(np.abs(my))):.4g}')
    return elements
