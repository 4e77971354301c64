import logging
import numpy as np
from scipy.integrate import trapezoid
# VIF imports
from VIF.LatticeModel import LatticeModel
from VIF.PairField import PairField
from VIF.SpectralFunction import JSamples
from VIF.errors import DomainError, NumericError

logger = logging.getLogger(__name__)

# Largest fraction of the line weight allowed to fall outside the omega grid
TAIL_TOLERANCE = 1e-4


class SpringResult:
    """
    Spring constant K = condensate_term - fermion_term. `fermion_term_lines` is the same fermionic term
    summed over the unbroadened lines.
    """

    def __init__(self, condensate_term: float, fermion_term: float, fermion_term_lines: float):
        self.condensate_term = float(condensate_term)
        self.fermion_term = float(fermion_term)
        self.fermion_term_lines = float(fermion_term_lines)

    def __float__(self):
        return self.k

    def __repr__(self):
        return 'SpringResult(k={!r}, condensate={!r}, fermion={!r})'.format(
            self.k, self.condensate_term, self.fermion_term)

    @property
    def k(self) -> float:
        return self.condensate_term - self.fermion_term

    @property
    def k_lines(self) -> float:
        return self.condensate_term - self.fermion_term_lines

    def to_dict(self) -> dict:
        return {'k': self.k, 'condensate_term': self.condensate_term, 'fermion_term': self.fermion_term,
                'k_lines': self.k_lines, 'fermion_term_lines': self.fermion_term_lines}


def fermion_integral(jsamples: JSamples) -> float:
    """ int_0^inf J(omega) / omega d omega by the trapezoid rule on the J grid """
    omega, values = jsamples.omega, jsamples.values
    if not np.any(values):
        return 0.0
    integrand = np.zeros_like(values)
    positive = omega > 0
    integrand[positive] = values[positive] / omega[positive]
    if omega[0] == 0:
        if jsamples.zero_is_singular():
            logger.warning('J(0) > 0: int J / omega is cut off at the first grid point')
        integrand[0] = jsamples.zero_limit_ratio()
    return float(trapezoid(integrand, omega))


def spring_constant(model: LatticeModel, pair: PairField, jsamples: JSamples, g: float,
                    fd_step: float = 0.01) -> SpringResult:
    """
    K = (1 / g) sum_x (|d_x0 Delta|^2 + |d_y0 Delta|^2) a^2 - int_0^inf J(omega) / omega d omega

    Parameters
    ----------
    model : LatticeModel
        lattice
    pair : PairField
        converged pair field
    jsamples : JSamples
        spectral function of the same configuration
    g : float
        pairing strength, > 0
    fd_step : float
        central-difference step for the center gradient, in lattice units

    Raises
    ------
    NumericError
        when more than TAIL_TOLERANCE of the line weight lies beyond the omega grid
    """
    if not g > 0:
        raise DomainError(f'pairing strength g = {g} must be > 0')
    total = jsamples.total_weight
    if total > 0:
        tail = 1 - jsamples.integrated_weight() / total
        if tail > TAIL_TOLERANCE:
            raise NumericError(f'{tail:.2e} of the spectral weight lies beyond omega = {jsamples.omega[-1]:.4g}; '
                               f'widen the omega grid',
                               diagnostics={'tail_fraction': tail, 'omega_max': float(jsamples.omega[-1])})
    d_x, d_y = pair.center_gradient(fd_step * model.a)
    condensate = float(np.sum(np.abs(d_x) ** 2 + np.abs(d_y) ** 2) * model.a ** 2 / g)
    fermion = fermion_integral(jsamples)
    keep = jsamples.lines_omega > 0
    fermion_lines = float(np.sum(jsamples.lines_weight[keep] / jsamples.lines_omega[keep]))
    result = SpringResult(condensate, fermion, fermion_lines)
    logger.info(f'Spring constant K = {result.k:.8g} (condensate {condensate:.8g}, fermion {fermion:.8g})')
    return result
