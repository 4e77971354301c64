"""
Transverse (Magnus) coefficient B of the vortex, computed two independent ways:

    virtual : first-order expansion of the center gradient of every eigenvector over the eigenbasis, using the
              force matrix elements and energy denominators
    state   : central differences of the eigenvectors re-solved at displaced vortex centers

Both evaluate the per-state form

    B = 2 hbar sum_k [ f_k Im <d_x u_k | d_y u_k> - (1 - f_k) Im <d_x v_k | d_y v_k> ]

oriented so that a q = +1 vortex has B > 0, and both report next to it the quasiparticle Berry sum

    B_qp = 2 hbar sum_k f_k Im <d_x Psi_k | d_y Psi_k>
         = hbar sum_{k != k'} (f_k - f_k') Im[M^x_kk' M^y_k'k] / (E_k - E_k')^2

The two differ by the occupation-independent remainder -2 hbar sum_k Im <d_x v_k | d_y v_k> over all 2N states.
On a clean bipartite lattice at mu = 0 the sublattice map (u, v) -> (S v, S u) takes the field to its
conjugate without changing any Berry curvature, while conjugation reverses them, so B_qp vanishes there.
"""
import logging
import numpy as np
from typing import Callable, Optional
# VIF imports
from VIF.LatticeModel import LatticeModel
from VIF.PairField import PairField
from VIF.BdGMatrix import assemble_bdg
from VIF.Spectrum import BdGSpectrum, diagonalize, occupations
from VIF.ForceMatrix import ForceMatrixElements
from VIF.SelfConsistency import converge_displaced
from VIF.XY import XY
from VIF.errors import NumericError, DomainError, ContractViolation

logger = logging.getLogger(__name__)

HBAR = 1.0
# Tenfold displacement reductions tried when a state is lost across the displacement
STEP_REFINEMENTS = 4


class TransverseResult:
    """
    B together with its per-state decomposition, the quasiparticle Berry sum `quasiparticle_part` and the
    occupation-independent `remainder` that separates it from B
    """

    def __init__(self, b: float, method: str, per_state, quasiparticle_part: Optional[float] = None,
                 remainder: Optional[float] = None, degenerate_pairs: int = 0):
        self.b = float(b)
        self.method = method
        self.per_state = np.asarray(per_state, dtype=float)
        self.quasiparticle_part = quasiparticle_part
        self.remainder = remainder
        self.degenerate_pairs = degenerate_pairs

    def __float__(self):
        return self.b

    def __repr__(self):
        return 'TransverseResult(b={!r}, method={!r})'.format(self.b, self.method)

    def to_dict(self) -> dict:
        out = {'b': self.b, 'method': self.method, 'degenerate_pairs': self.degenerate_pairs}
        if self.quasiparticle_part is not None:
            out['quasiparticle_part'] = self.quasiparticle_part
            out['remainder'] = self.remainder
        return out


def _zero(method: str, size: int) -> TransverseResult:
    return TransverseResult(0.0, method, np.zeros(size), 0.0, 0.0)


def _per_state(f: np.ndarray, pu: np.ndarray, pv: np.ndarray) -> np.ndarray:
    return 2 * HBAR * (f * pu.imag - (1 - f) * pv.imag)


def _degenerate_check(elements: ForceMatrixElements, labels: np.ndarray, scale: float) -> int:
    """
    Counts the intra-cluster pairs with a non-negligible Im[M^x M^y] and asserts that they cancel over each
    cluster (Im Tr of a product of Hermitian blocks vanishes)
    """
    count = 0
    for label in np.unique(labels):
        idx = np.nonzero(labels == label)[0]
        if idx.size < 2:
            continue
        block = elements.mx[np.ix_(idx, idx)] * elements.my[np.ix_(idx, idx)].T
        np.fill_diagonal(block, 0)
        terms = block.imag
        significant = np.abs(terms) > 1e-10 * scale
        if np.any(significant):
            count += int(np.sum(significant)) // 2
            bound = float(np.sum(np.abs(terms)))
            if abs(float(np.sum(terms))) > 1e-8 * max(bound, scale):
                raise ContractViolation(f'degenerate cluster at state {idx[0]} does not cancel: '
                                        f'sum {np.sum(terms):.3e}, bound {bound:.3e}')
    if count:
        logger.warning(f'{count} near-degenerate pairs carry Im[M^x M^y] inside the degeneracy window; '
                       f'their contributions cancel within each cluster and are excluded')
    return count


def transverse_coefficient_virtual(elements: ForceMatrixElements, spectrum: BdGSpectrum,
                                   degeneracy_tol: float = 1e-8) -> TransverseResult:
    """
    B from virtual transitions: the center gradient of state k is expanded to first order as
    sum_{k' not degenerate with k} Psi_k' M_{k'k} / (E_k - E_k')

    Parameters
    ----------
    elements : ForceMatrixElements
        force matrix elements in the eigenbasis of `spectrum`
    spectrum : BdGSpectrum
        spectrum with occupations
    degeneracy_tol : float
        states closer in energy than this form one cluster and do not mix through the expansion

    Returns
    -------
    TransverseResult
    """
    f = spectrum.require_occupations()
    size = len(spectrum)
    if elements.vanishes:
        return _zero('virtual', size)
    e = spectrum.energies
    labels = spectrum.cluster_labels(degeneracy_tol)
    same = labels[:, None] == labels[None, :]
    gap = e[None, :] - e[:, None]
    with np.errstate(divide='ignore', invalid='ignore'):
        inv_gap = np.where(same, 0.0, 1.0 / np.where(same, 1.0, gap))
    degenerate_pairs = _degenerate_check(elements, labels, float(np.max(np.abs(elements.mx))) ** 2)

    # d_x[k', k] = M^x_{k'k} / (E_k - E_k')
    d_x = elements.mx * inv_gap
    d_y = elements.my * inv_gap
    n = spectrum.n_sites
    u, v = spectrum.u, spectrum.v
    gram_u = u.conj().T @ u
    gram_v = np.eye(2 * n) - gram_u
    pu = np.sum(d_x.conj() * (gram_u @ d_y), axis=0)
    pv = np.sum(d_x.conj() * (gram_v @ d_y), axis=0)
    per_state = _per_state(f, pu, pv)
    quasiparticle = float(2 * HBAR * np.sum(f * (pu + pv).imag))
    remainder = float(-2 * HBAR * np.sum(pv.imag))
    b = float(np.sum(per_state))
    logger.info(f'Transverse coefficient (virtual transitions): B = {b:.8g}')
    return TransverseResult(b, 'virtual', per_state, quasiparticle, remainder, degenerate_pairs)


def quasiparticle_berry_sum(elements: ForceMatrixElements, spectrum: BdGSpectrum,
                            degeneracy_tol: float = 1e-8) -> float:
    """ sum_{k != k', non-degenerate} hbar (f_k - f_k') Im[M^x_kk' M^y_k'k] / (E_k - E_k')^2 """
    f = spectrum.require_occupations()
    e = spectrum.energies
    labels = spectrum.cluster_labels(degeneracy_tol)
    same = labels[:, None] == labels[None, :]
    gap = np.where(same, 1.0, e[:, None] - e[None, :])
    terms = (f[:, None] - f[None, :]) * (elements.mx * elements.my.T).imag / gap ** 2
    return float(HBAR * np.sum(np.where(same, 0.0, terms)))


class RigidSpectrumProvider:
    """
    Spectrum of the lattice with a displaced pair field, diagonalized as given
    """

    def __init__(self, model: LatticeModel, beta: float):
        self.model = model
        self.beta = beta

    def __call__(self, pair: PairField) -> BdGSpectrum:
        return occupations(diagonalize(assemble_bdg(self.model, pair)), self.beta)


class AdiabaticSpectrumProvider:
    """
    Spectrum of the lattice after re-converging the gap equation from the displaced pair field
    """

    def __init__(self, model: LatticeModel, g: float, beta: float, cutoff: float, tol: float = 1e-6,
                 max_iter: int = 200, mixing: float = 0.5, pin_phase: bool = False):
        self.model = model
        self.g = g
        self.beta = beta
        self.cutoff = cutoff
        self.tol = tol
        self.max_iter = max_iter
        self.mixing = mixing
        self.pin_phase = pin_phase

    def __call__(self, pair: PairField) -> BdGSpectrum:
        _, spectrum = converge_displaced(self.model, pair, self.g, self.beta, self.cutoff, self.tol,
                                         self.max_iter, self.mixing, self.pin_phase)
        return spectrum


def align_states(reference: BdGSpectrum, other: BdGSpectrum, clusters, overlap_min: float = 0.9) -> np.ndarray:
    """
    Gauge-aligns the eigenvectors of `other` to those of `reference`: every single state gets the phase of
    maximal overlap, every degenerate cluster the unitary of maximal overlap (orthogonal Procrustes)

    Raises
    ------
    NumericError
        naming the first state whose overlap singular value falls below `overlap_min`
    """
    ref, new = reference.states, other.states
    aligned = np.empty_like(new)
    for cluster in clusters:
        s = ref[:, cluster].conj().T @ new[:, cluster]
        a, sv, bh = np.linalg.svd(s)
        if sv.min() < overlap_min:
            state = int(cluster[np.argmin(sv)]) if cluster.size > 1 else int(cluster[0])
            raise NumericError(f'lost track of state {state} across the displacement (overlap {sv.min():.3f})',
                               diagnostics={'state': state, 'overlap': float(sv.min())})
        aligned[:, cluster] = new[:, cluster] @ (bh.conj().T @ a.conj().T)
    return aligned


def _state_gradients(pair: PairField, spectrum_provider: Callable, reference: BdGSpectrum, clusters, eps: float,
                     overlap_min: float):
    """ Central-difference center gradients of the aligned eigenvectors """
    grads = []
    for step in (XY([eps, 0.0]), XY([0.0, eps])):
        plus = align_states(reference, spectrum_provider(pair.displace(step)), clusters, overlap_min)
        minus = align_states(reference, spectrum_provider(pair.displace(-step)), clusters, overlap_min)
        grads.append((plus - minus) / (2 * eps))
    return grads


def transverse_coefficient_state(model: LatticeModel, pair: PairField, spectrum_provider: Callable,
                                 fd_step: float = 0.01, degeneracy_tol: float = 1e-8,
                                 reference: Optional[BdGSpectrum] = None,
                                 overlap_min: float = 0.9) -> TransverseResult:
    """
    B from the states themselves: the spectrum is re-solved at the four centers x0 +- eps x, x0 +- eps y,
    each displaced eigenbasis is aligned to the undisplaced one and the gradients are taken by central
    differences

    Parameters
    ----------
    model : LatticeModel
        lattice
    pair : PairField
        undisplaced pair field
    spectrum_provider : callable
        PairField -> BdGSpectrum with occupations; RigidSpectrumProvider or AdiabaticSpectrumProvider
    fd_step : float
        displacement in lattice units; reduced tenfold, up to STEP_REFINEMENTS times, while the alignment
        loses a state to a near-degenerate neighbour
    degeneracy_tol : float
        clusters of states closer than this are aligned as subspaces
    reference : BdGSpectrum or None
        undisplaced spectrum; solved with the provider when None

    Returns
    -------
    TransverseResult
        B and the per-state contributions

    Raises
    ------
    NumericError
        if a state is still lost at the smallest displacement; diagnostics hold that displacement
    """
    if pair.site_shape != model.site_shape:
        raise DomainError('pair field and lattice sizes do not match')
    reference = reference if reference is not None else spectrum_provider(pair)
    f = reference.require_occupations()
    if pair.winding == 0:
        return _zero('state', len(reference))
    eps = fd_step * model.a
    clusters = reference.clusters(degeneracy_tol)
    for refinement in range(STEP_REFINEMENTS + 1):
        try:
            d_x, d_y = _state_gradients(pair, spectrum_provider, reference, clusters, eps, overlap_min)
            break
        except NumericError as exc:
            if refinement == STEP_REFINEMENTS:
                exc.diagnostics['fd_step'] = eps / model.a
                raise
            logger.warning(f'{exc}; retrying with displacement {eps / 10:.1e}')
            eps /= 10
    n = model.n_sites
    pu = np.sum(d_x[:n].conj() * d_y[:n], axis=0)
    pv = np.sum(d_x[n:].conj() * d_y[n:], axis=0)
    per_state = _per_state(f, pu, pv)
    quasiparticle = float(2 * HBAR * np.sum(f * (pu + pv).imag))
    remainder = float(-2 * HBAR * np.sum(pv.imag))
    b = float(np.sum(per_state))
    logger.info(f'Transverse coefficient (state derivatives): B = {b:.8g}, quasiparticle part {quasiparticle:.8g}')
    return TransverseResult(b, 'state', per_state, quasiparticle, remainder)
