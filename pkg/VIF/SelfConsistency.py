"""
Gap-equation iteration for the vortex pair field and the mean-field grand potential
"""
import logging
import numpy as np
from scipy.optimize import brentq
from typing import Optional
# VIF imports
from VIF.LatticeModel import LatticeModel
from VIF.PairField import PairField, default_loop, loop_amplitude, winding_number, PHASE_FLOOR
from VIF.BdGMatrix import assemble_bdg
from VIF.Spectrum import BdGSpectrum, diagonalize, occupations, fermi
from VIF.errors import DomainError, TopologyError

logger = logging.getLogger(__name__)


class SelfConsistencyReport:
    """
    Record of one gap-equation iteration: residual_history[i] is max_x |Delta_new - Delta_old| of
    iteration i + 1, and converged is True exactly when the last residual is below the tolerance
    """

    def __init__(self, coupling_g: float, cutoff: float, tolerance: float, mixing: float, pin_phase: bool = False):
        self.coupling_g = coupling_g
        self.cutoff = cutoff
        self.tolerance = tolerance
        self.mixing = mixing
        self.pin_phase = pin_phase
        self.residual_history = []

    def __repr__(self):
        return 'SelfConsistencyReport(iterations={}, converged={}, residual={})'.format(
            self.iterations, self.converged, self.final_residual)

    @property
    def iterations(self) -> int:
        return len(self.residual_history)

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1] if self.residual_history else float('nan')

    @property
    def converged(self) -> bool:
        return bool(self.residual_history) and self.residual_history[-1] < self.tolerance

    def record(self, residual: float):
        self.residual_history.append(float(residual))

    def to_dict(self) -> dict:
        return {'iterations': self.iterations,
                'converged': self.converged,
                'final_residual': self.final_residual,
                'residual_history': list(self.residual_history),
                'coupling_g': self.coupling_g,
                'cutoff': self.cutoff,
                'tolerance': self.tolerance,
                'mixing': self.mixing,
                'pin_phase': self.pin_phase}


def gap_update(spectrum: BdGSpectrum, g: float, cutoff: float) -> np.ndarray:
    """
    Right-hand side of the gap equation, g * sum_{0 < E_k < cutoff} u_k(x) v_k*(x) (1 - 2 f_k)
    """
    f = spectrum.require_occupations()
    e = spectrum.energies
    window = (e > 0) & (e < cutoff)
    weight = 1 - 2 * f[window]
    return g * np.einsum('xk,xk,k->x', spectrum.u[:, window], spectrum.v[:, window].conj(), weight)


def _check_winding(field: PairField, loop, iteration: int):
    if loop is None or field.winding == 0 or field.degenerate:
        return
    if loop_amplitude(field, loop) < PHASE_FLOOR:
        return
    try:
        found = winding_number(field, loop)
    except DomainError:
        found = None
    if found != field.winding:
        raise TopologyError(f'winding changed from {field.winding} to {found} at iteration {iteration}; '
                            f'the lattice is too coarse or the disorder too strong',
                            diagnostics={'iteration': iteration, 'winding': found})


def self_consistent_gap(model: LatticeModel,
                        seed: PairField,
                        g: float,
                        beta: float = float('inf'),
                        cutoff: float = 4.0,
                        tol: float = 1e-6,
                        max_iter: int = 200,
                        mixing: float = 0.5,
                        pin_phase: bool = False,
                        ):
    """
    Iterates the gap equation with linear mixing, Delta <- (1 - mixing) Delta + mixing Delta_new, until
    max_x |Delta_new - Delta| < tol

    Parameters
    ----------
    model : LatticeModel
        lattice and impurity potential
    seed : PairField
        starting field; its center and winding are carried through the iteration
    g : float
        pairing strength, > 0
    beta : float
        inverse temperature, > 0 or inf
    cutoff : float
        upper edge of the positive-energy window entering the pair sum
    tol : float
        convergence threshold on the max-site residual
    max_iter : int
        iteration limit
    mixing : float
        linear mixing fraction in (0, 1]
    pin_phase : bool
        keep the phase of every site at the phase of `seed` and iterate the amplitude only. The
        vortex then cannot drift or unwind.

    Returns
    -------
    (PairField, BdGSpectrum, SelfConsistencyReport)
        the last diagonalized field, its spectrum with occupations, and the report. When max_iter is
        exhausted the report has converged = False and the caller decides what to do.

    Raises
    ------
    TopologyError
        if the phase winding around the vortex changes during the iteration
    """
    if not g > 0:
        raise DomainError(f'pairing strength g = {g} must be > 0')
    if not tol > 0:
        raise DomainError(f'tolerance {tol} must be > 0')
    if not 0 < mixing <= 1:
        raise DomainError(f'mixing {mixing} must lie in (0, 1]')
    if int(max_iter) < 1:
        raise DomainError(f'max_iter {max_iter} must be >= 1')
    if not cutoff > 0:
        raise DomainError(f'cutoff {cutoff} must be > 0')

    report = SelfConsistencyReport(g, cutoff, tol, mixing, pin_phase)
    phase = np.exp(1j * np.angle(seed.delta)) if pin_phase else None
    loop = default_loop(seed) if seed.winding else None
    field = seed
    logger.info(f'Running self-consistency on {model.nx}x{model.ny} lattice, q={seed.winding}, g={g}')
    for iteration in range(1, int(max_iter) + 1):
        spectrum = occupations(diagonalize(assemble_bdg(model, field)), beta)
        new = gap_update(spectrum, g, cutoff)
        if phase is not None:
            new = (new * phase.conj()).real * phase
        residual = float(np.max(np.abs(new - field.delta)))
        report.record(residual)
        _check_winding(field.with_delta(new), loop, iteration)
        logger.debug(f'iteration {iteration}: residual {residual:.3e}')
        if residual < tol:
            logger.info(f'Self-consistency converged after {iteration} iterations')
            return field, spectrum, report
        field = field.with_delta((1 - mixing) * field.delta + mixing * new)
    logger.warning(f'Self-consistency did not converge in {max_iter} iterations '
                   f'(residual {report.final_residual:.3e} > {tol:.1e})')
    return field, spectrum, report


def homogeneous_gap(model: LatticeModel, g: float, beta: float = float('inf'), cutoff: float = 4.0) -> float:
    """
    Root of the discrete BCS gap condition 1 = (g / N) * sum_k (1 - 2 f(E_k)) / (2 E_k), E_k = sqrt(xi_k^2 + D^2),
    summed over the normal-state levels of `model` whose E_k falls in the cutoff window. Returns 0 when the
    condition has no positive root.
    """
    xi = np.linalg.eigvalsh(model.hamiltonian().toarray())

    def condition(gap):
        e = np.sqrt(xi ** 2 + gap ** 2)
        window = (e > 0) & (e < cutoff)
        return 1 - g / model.n_sites * np.sum((1 - 2 * fermi(e[window], beta)) / (2 * e[window]))

    lo, hi = 1e-12, cutoff
    if condition(lo) > 0 or condition(hi) < 0:
        return 0.0
    return brentq(condition, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def thermodynamic_potential(model: LatticeModel, pair: PairField, spectrum: BdGSpectrum, g: float,
                            cutoff: float) -> float:
    """
    Cutoff-regularized mean-field grand potential

        Omega = sum_x |Delta(x)|^2 / g + Tr H - sum_{0 < E_k < cutoff} [ E_k + (2 / beta) ln(1 + exp(-beta E_k)) ]

    Tr H runs over all normal-state levels and does not depend on Delta. The quasiparticle sum runs over the
    same window as `gap_update`, so Omega is stationary exactly at the fixed points of the gap equation. Levels
    at or above the cutoff are left out of Omega altogether, so it differs from the full mean-field potential
    by the Delta-dependent term sum_{E_k >= cutoff} E_k; with cutoff above the largest E_k the two agree up to
    a constant. Only differences between fields on the same lattice with the same cutoff are meaningful.
    """
    if not g > 0:
        raise DomainError(f'pairing strength g = {g} must be > 0')
    beta = spectrum.beta
    if beta is None:
        raise DomainError('spectrum has no temperature; call occupations(spectrum, beta) first')
    e = spectrum.energies
    e = e[(e > 0) & (e < cutoff)]
    thermal = 0.0 if np.isinf(beta) else np.sum(2.0 / beta * np.log1p(np.exp(-beta * e)))
    trace_h = float(model.hamiltonian().diagonal().sum())
    return float(np.sum(np.abs(pair.delta) ** 2) / g + trace_h - np.sum(e) - thermal)


def converge_displaced(model: LatticeModel, pair: PairField, g: float, beta: float, cutoff: float,
                       tol: float = 1e-6, max_iter: int = 200, mixing: float = 0.5,
                       pin_phase: bool = False, displaced: Optional[PairField] = None):
    """
    Re-converges the gap equation starting from a displaced field instead of keeping the rigid translation.
    Used by the adiabatic variant of the displaced-spectrum provider.
    """
    start = displaced if displaced is not None else pair
    field, spectrum, report = self_consistent_gap(model, start, g, beta, cutoff, tol, max_iter, mixing, pin_phase)
    if not report.converged:
        logger.warning('Displaced field did not re-converge; using the last iterate')
    return field, spectrum
