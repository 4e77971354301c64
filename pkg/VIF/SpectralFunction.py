"""
Spectral function J(omega) of the vortex environment: the transition lines between quasiparticle levels
and their Gaussian broadening on a frequency grid
"""
import logging
import numpy as np
from scipy.integrate import trapezoid
from typing import Optional
# VIF imports
from VIF.ForceMatrix import ForceMatrixElements
from VIF.Spectrum import BdGSpectrum
from VIF.Grid import UniformGrid
from VIF.errors import DomainError

logger = logging.getLogger(__name__)

# Gaussians are cut at this many widths
GAUSS_REACH = 8.0
# Grid samples per broadening chunk
CHUNK = 64


class JSamples:
    """
    J(omega) sampled on `omega`, together with the unbroadened lines it was built from. `lines_omega` is
    sorted ascending; `lines_weight[l]` is the integrated weight of line l.
    """

    def __init__(self, omega, values, eta_b: float, lines_omega=None, lines_weight=None):
        self.omega = np.asarray(omega, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.eta_b = float(eta_b)
        if self.omega.shape != self.values.shape or self.omega.ndim != 1:
            raise DomainError(f'omega grid {self.omega.shape} and J values {self.values.shape} do not match')
        self.lines_omega = np.zeros(0) if lines_omega is None else np.asarray(lines_omega, dtype=float)
        self.lines_weight = np.zeros(0) if lines_weight is None else np.asarray(lines_weight, dtype=float)

    def __repr__(self):
        return 'JSamples(points={}, lines={}, eta_b={})'.format(self.omega.size, self.lines_omega.size, self.eta_b)

    @property
    def has_lines(self) -> bool:
        return self.lines_omega.size > 0 or self.lines_weight.size > 0

    @property
    def total_weight(self) -> float:
        """ Unbroadened double sum of the transition weights """
        return float(np.sum(self.lines_weight))

    def integrated_weight(self) -> float:
        """ int J(omega) d omega over the grid """
        return float(trapezoid(self.values, self.omega))

    def vanishes(self) -> bool:
        return not np.any(self.values) and not np.any(self.lines_weight)

    def scaled(self, factor: float) -> 'JSamples':
        return JSamples(self.omega, factor * self.values, self.eta_b,
                        self.lines_omega, factor * self.lines_weight)

    def zero_limit_ratio(self) -> float:
        """ J(omega) / omega at the first grid point above zero, the estimate used for omega -> 0 """
        positive = np.nonzero(self.omega > 0)[0]
        if positive.size == 0:
            raise DomainError('omega grid has no positive frequencies')
        i = positive[0]
        return float(self.values[i] / self.omega[i])

    def zero_is_singular(self) -> bool:
        """ J(0) carries weight, so J / omega diverges at the origin """
        if self.omega[0] != 0 or not np.any(self.values):
            return False
        return bool(self.values[0] > 1e-12 * np.max(self.values))


def transition_lines(elements: ForceMatrixElements, spectrum: BdGSpectrum, degeneracy_tol: float = 1e-10):
    """
    Unbroadened lines of the spectral function: for every pair k < k', a line at |E_k - E_k'| carrying

        (pi / 2) * 2 |f_k - f_k'| (|M^x_kk'|^2 + |M^y_kk'|^2) / 2

    The double sum over states runs over ordered pairs, and (k, k') and (k', k) put equal weight at the
    same |omega|, hence the factor 2. An empty level k' above a filled level k with |M^x| = |M^y| = m0
    thus gives a single line of weight pi m0^2, twice the (pi / 2) m0^2 of one ordered term. Pairs closer
    than `degeneracy_tol` in energy and lines of zero weight are dropped.

    Returns
    -------
    (np.ndarray, np.ndarray)
        line positions sorted ascending, and their weights
    """
    f = spectrum.require_occupations()
    e = spectrum.energies
    weight = elements.isotropic_weight()
    rows, cols = np.triu_indices(e.size, k=1)
    omega = np.abs(e[rows] - e[cols])
    w = np.pi * np.abs(f[rows] - f[cols]) * weight[rows, cols]
    keep = (w > 0) & (omega > degeneracy_tol)
    omega, w = omega[keep], w[keep]
    order = np.argsort(omega, kind='stable')
    return omega[order], w[order]


def broaden(omega, lines_omega, lines_weight, eta_b: float) -> np.ndarray:
    """
    Sum of normalized Gaussians of width eta_b centered on the lines, each reflected at omega = 0 so its whole
    weight stays on the half line. `lines_omega` must be sorted ascending.
    """
    omega = np.asarray(omega, dtype=float)
    out = np.zeros_like(omega)
    if lines_omega.size == 0:
        return out
    reach = GAUSS_REACH * eta_b
    for start in range(0, omega.size, CHUNK):
        om = omega[start:start + CHUNK]
        lo = np.searchsorted(lines_omega, om[0] - reach, side='left')
        hi = np.searchsorted(lines_omega, om[-1] + reach, side='right')
        if hi > lo:
            d = (om[:, None] - lines_omega[None, lo:hi]) / eta_b
            out[start:start + CHUNK] += np.exp(-0.5 * d * d) @ lines_weight[lo:hi]
        # mirror images at -Omega
        hi = np.searchsorted(lines_omega, reach - om[0], side='right')
        if hi > 0:
            d = (om[:, None] + lines_omega[None, :hi]) / eta_b
            out[start:start + CHUNK] += np.exp(-0.5 * d * d) @ lines_weight[:hi]
    return out / (np.sqrt(2 * np.pi) * eta_b)


def default_broadening(spectrum: BdGSpectrum, cutoff: float, factor: float = 3.0) -> float:
    """ `factor` times the mean level spacing of the energies inside (-cutoff, cutoff) """
    e = spectrum.energies
    e = e[np.abs(e) < cutoff]
    if e.size < 2:
        e = spectrum.energies
    return factor * float((e[-1] - e[0]) / (e.size - 1))


def default_omega_grid(spectrum: BdGSpectrum, eta_b: float, omega_max: Optional[float] = None,
                       spacing_fraction: float = 0.25) -> UniformGrid:
    """
    Grid from 0 with spacing eta_b * spacing_fraction reaching past the largest transition energy by
    GAUSS_REACH widths, or to `omega_max` if given
    """
    if omega_max is None:
        omega_max = float(spectrum.energies[-1] - spectrum.energies[0]) + GAUSS_REACH * eta_b
    return UniformGrid.covering(0.0, omega_max, spacing_fraction * eta_b)


def spectral_function(elements: ForceMatrixElements, spectrum: BdGSpectrum, omega_grid, eta_b: float,
                      degeneracy_tol: float = 1e-10) -> JSamples:
    """
    J(omega) = (pi / 2) sum_{k, k'} delta_eta(omega - |E_k - E_k'|) |f_k - f_k'| (|M^x_kk'|^2 + |M^y_kk'|^2) / 2

    with delta_eta a normalized Gaussian of width eta_b

    Parameters
    ----------
    elements : ForceMatrixElements
        force matrix elements in the eigenbasis of `spectrum`
    spectrum : BdGSpectrum
        spectrum with occupations
    omega_grid : UniformGrid or array-like
        ascending frequencies >= 0
    eta_b : float
        broadening width, > 0

    Raises
    ------
    DomainError
        if the grid is empty, unsorted or negative, or eta_b <= 0
    """
    omega = omega_grid.values if isinstance(omega_grid, UniformGrid) else np.asarray(omega_grid, dtype=float)
    if omega.size == 0:
        raise DomainError('omega grid is empty')
    if np.any(omega < 0) or np.any(np.diff(omega) <= 0):
        raise DomainError('omega grid must be ascending and non-negative')
    if not eta_b > 0:
        raise DomainError(f'broadening eta_b = {eta_b} must be > 0')
    lines_omega, lines_weight = transition_lines(elements, spectrum, degeneracy_tol * spectrum.energy_scale)
    values = broaden(omega, lines_omega, lines_weight, eta_b)
    logger.info(f'Spectral function: {lines_omega.size} lines, total weight {lines_weight.sum():.6g}, '
                f'eta_b={eta_b:.4g}')
    return JSamples(omega, values, eta_b, lines_omega, lines_weight)
