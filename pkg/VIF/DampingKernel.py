"""
Imaginary-time damping kernel

    F(tau) = (1 / pi) int_0^inf d omega J(omega) cosh[omega (beta / 2 - |tau|)] / sinh[omega beta / 2]
"""
import logging
import numpy as np
from scipy.integrate import trapezoid
# VIF imports
from VIF.SpectralFunction import JSamples
from VIF.Grid import UniformGrid
from VIF.errors import DomainError

logger = logging.getLogger(__name__)

valid_methods = ('quadrature', 'lines')


class DampingSamples:
    """ F(tau) on `tau` at inverse temperature `beta`, with the flags raised while computing it """

    def __init__(self, tau, values, beta: float, method: str = 'quadrature', ir_singular: bool = False):
        self.tau = np.asarray(tau, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.beta = float(beta)
        self.method = method
        self.ir_singular = bool(ir_singular)

    def __repr__(self):
        return 'DampingSamples(points={}, beta={}, method={!r})'.format(self.tau.size, self.beta, self.method)

    def symmetry_error(self) -> float:
        """
        Largest relative |F(tau) - F(beta - tau)| over the pairs of samples mirrored about beta / 2.
        Zero when the grid has no mirrored pairs or beta is infinite.
        """
        if np.isinf(self.beta):
            return 0.0
        mirrored = np.interp(self.beta - self.tau, self.tau, self.values)
        inside = (self.beta - self.tau >= self.tau[0]) & (self.beta - self.tau <= self.tau[-1])
        scale = np.max(np.abs(self.values)) if np.any(self.values) else 1.0
        if not np.any(inside):
            return 0.0
        return float(np.max(np.abs(self.values[inside] - mirrored[inside])) / scale)


def thermal_ratio(omega, tau, beta: float) -> np.ndarray:
    """
    cosh[omega (beta/2 - tau)] / sinh[omega beta / 2] for omega > 0, 0 <= tau <= beta, using only exponentials
    of non-positive arguments. beta = inf gives exp(-omega tau).

    omega and tau broadcast against each other.
    """
    omega = np.asarray(omega, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.isinf(beta):
        return np.exp(-omega * tau)
    s = beta / 2
    d = np.abs(s - tau)
    return (np.exp(omega * (d - s)) + np.exp(-omega * (d + s))) / -np.expm1(-2 * omega * s)


def _check_tau(tau: np.ndarray, beta: float):
    if tau.size == 0:
        raise DomainError('tau grid is empty')
    if np.any(tau < 0) or (np.isfinite(beta) and np.any(tau > beta * (1 + 1e-12))):
        raise DomainError(f'tau grid must lie inside [0, beta = {beta}]')


def damping_kernel(jsamples: JSamples, tau_grid, beta: float, method: str = 'quadrature') -> DampingSamples:
    """
    Parameters
    ----------
    jsamples : JSamples
        spectral function; its grid must resolve the broadening
    tau_grid : UniformGrid or array-like
        imaginary times inside [0, beta]
    beta : float
        inverse temperature, > 0 or inf
    method : str
        'quadrature' integrates the sampled J with the trapezoid rule; 'lines' sums the unbroadened lines
        in closed form

    Returns
    -------
    DampingSamples
        with ir_singular set when J(0) > 0 made the omega -> 0 end of the quadrature diverge
    """
    beta = float(beta)
    if not beta > 0:
        raise DomainError(f'beta = {beta} must be > 0 or inf')
    if method not in valid_methods:
        raise DomainError(f'{method} must be one of {valid_methods}')
    tau = tau_grid.values if isinstance(tau_grid, UniformGrid) else np.asarray(tau_grid, dtype=float)
    _check_tau(tau, beta)

    if method == 'lines':
        keep = jsamples.lines_omega > 0
        ratio = thermal_ratio(jsamples.lines_omega[keep][:, None], tau[None, :], beta)
        values = jsamples.lines_weight[keep] @ ratio / np.pi
        return DampingSamples(tau, values, beta, method)

    omega = jsamples.omega
    if np.any(np.diff(omega) > jsamples.eta_b):
        logger.warning('omega grid is coarser than the broadening width; F(tau) quadrature is under-resolved')
    integrand = np.zeros((omega.size, tau.size))
    positive = omega > 0
    integrand[positive] = jsamples.values[positive, None] * thermal_ratio(omega[positive, None], tau[None, :], beta)
    ir_singular = False
    if omega[0] == 0:
        ir_singular = jsamples.zero_is_singular()
        if ir_singular:
            logger.warning('J(0) > 0: the omega -> 0 end of the damping kernel is cut off by its series limit')
        if np.isinf(beta):
            integrand[0] = jsamples.values[0]
        else:
            # J * cosh/sinh -> (2 / beta) J / omega as omega -> 0
            integrand[0] = 2.0 / beta * jsamples.zero_limit_ratio()
    values = trapezoid(integrand, omega, axis=0) / np.pi
    return DampingSamples(tau, values, beta, method, ir_singular)


def default_tau_grid(beta: float, count: int = 201, tau_max: float = 50.0) -> UniformGrid:
    """ `count` samples on [0, beta], or on [0, tau_max] at zero temperature """
    stop = tau_max if np.isinf(beta) else beta
    return UniformGrid.from_range(0.0, stop, count)
