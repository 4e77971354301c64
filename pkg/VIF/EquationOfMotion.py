"""
Classical vortex dynamics in the stationary-action limit of the effective action:

    eta v + int_0^t gamma(t - t') v(t') dt' + K x = F_ext(t) + B z x v        (massless)
    m dv/dt + (same left-hand side terms)            = F_ext(t) + B z x v        (regularizing mass)

The Magnus force B z x v sits on the force side, so a driven vortex moves at +arctan(B / eta) from the drive and
a pinned vortex with B > 0 orbits clockwise.
"""
import logging
import numbers
import numpy as np
from scipy.integrate import trapezoid
from typing import Optional
# VIF imports
from VIF.SpectralFunction import JSamples
from VIF.errors import DomainError

logger = logging.getLogger(__name__)


class OhmicFit:
    """ eta from a least-squares fit of J(omega) = eta * omega over (0, omega_fit] """

    def __init__(self, eta: float, residual: float, omega_fit: float, non_ohmic: bool):
        self.eta = float(eta)
        self.residual = float(residual)
        self.omega_fit = float(omega_fit)
        self.non_ohmic = bool(non_ohmic)

    def __float__(self):
        return self.eta

    def __repr__(self):
        return 'OhmicFit(eta={!r}, residual={!r}, non_ohmic={})'.format(self.eta, self.residual, self.non_ohmic)

    def to_dict(self) -> dict:
        return {'eta': self.eta, 'residual': self.residual, 'omega_fit': self.omega_fit,
                'non_ohmic': self.non_ohmic}


def ohmic_reduction(jsamples: JSamples, omega_fit: Optional[float] = None, threshold: float = 0.2,
                    weight_floor: float = 1e-8) -> OhmicFit:
    """
    Low-frequency slope eta = lim J(omega) / omega

    Parameters
    ----------
    jsamples : JSamples
        spectral function
    omega_fit : float or None
        upper edge of the fit window; 10 eta_b when None
    threshold : float
        relative rms residual above which the window is flagged non-Ohmic
    weight_floor : float
        a window holding less than this fraction of the total weight is flagged non-Ohmic (gapped J)

    Returns
    -------
    OhmicFit
    """
    omega_fit = 10 * jsamples.eta_b if omega_fit is None else float(omega_fit)
    window = (jsamples.omega > 0) & (jsamples.omega <= omega_fit)
    if not np.any(window):
        raise DomainError(f'no grid points in the Ohmic fit window (0, {omega_fit}]')
    w = jsamples.omega[window]
    j = jsamples.values[window]
    if not np.any(jsamples.values):
        return OhmicFit(0.0, 0.0, omega_fit, False)
    eta = float(np.dot(w, j) / np.dot(w, w))
    norm = np.linalg.norm(j)
    residual = float(np.linalg.norm(j - eta * w) / norm) if norm > 0 else 1.0
    total = jsamples.integrated_weight()
    window_weight = float(trapezoid(j, w)) if w.size > 1 else float(j[0] * w[0])
    non_ohmic = residual > threshold or (total > 0 and window_weight < weight_floor * total)
    if non_ohmic:
        logger.warning(f'J(omega) is not Ohmic below omega = {omega_fit:.4g} (fit residual {residual:.3g})')
    return OhmicFit(eta, residual, omega_fit, non_ohmic)


def memory_kernel(jsamples: JSamples, times) -> np.ndarray:
    """
    Real-time friction kernel gamma(t) = (2 / pi) int_0^inf J(omega) / omega cos(omega t) d omega, sampled on
    `times`. For J = eta * omega below a cutoff, gamma tends to 2 eta delta(t) and int_0^inf gamma = eta.
    """
    omega, values = jsamples.omega, jsamples.values
    times = np.asarray(times, dtype=float)
    ratio = np.zeros_like(values)
    positive = omega > 0
    ratio[positive] = values[positive] / omega[positive]
    if omega[0] == 0:
        ratio[0] = jsamples.zero_limit_ratio()
    return 2.0 / np.pi * trapezoid(ratio[:, None] * np.cos(omega[:, None] * times[None, :]), omega, axis=0)


class Drive:
    """
    External force on the vortex: 'none', 'constant' F0, or 'sinusoidal' F0 cos(frequency t)
    """
    valid_kinds = ('none', 'constant', 'sinusoidal')

    def __init__(self, kind: str = 'none', amplitude=(0.0, 0.0), frequency: float = 0.0):
        if kind not in Drive.valid_kinds:
            raise DomainError(f'{kind} must be one of {Drive.valid_kinds}')
        self.kind = kind
        self.amplitude = np.asarray(amplitude, dtype=float)
        if self.amplitude.shape != (2,):
            raise DomainError(f'drive amplitude {amplitude} must be a 2-vector')
        self.frequency = float(frequency)

    def __repr__(self):
        return 'Drive({!r}, amplitude={}, frequency={})'.format(self.kind, self.amplitude.tolist(), self.frequency)

    @property
    def vanishes(self) -> bool:
        return self.kind == 'none' or not np.any(self.amplitude)

    def __call__(self, t: float) -> np.ndarray:
        if self.kind == 'none':
            return np.zeros(2)
        if self.kind == 'constant':
            return self.amplitude.copy()
        return self.amplitude * np.cos(self.frequency * t)


class EquationOfMotion:
    """
    Coefficients of the vortex equation of motion. `memory` holds gamma(t) on the grid 0, memory_dt, ...;
    when it is None friction is the instantaneous eta v. `mass` None means massless (first order) dynamics.
    """

    def __init__(self, b: float, k_spring: float, eta: float = 0.0, memory=None, memory_dt: Optional[float] = None,
                 drive: Optional[Drive] = None, mass: Optional[float] = None):
        for name, value in (('b', b), ('k_spring', k_spring), ('eta', eta)):
            if not isinstance(value, numbers.Real) or not np.isfinite(value):
                raise DomainError(f'{name} = {value} must be a finite real number')
        if eta < 0:
            raise DomainError(f'eta = {eta} must be >= 0')
        if mass is not None and not mass > 0:
            raise DomainError(f'regularizing mass {mass} must be > 0')
        if memory is not None and not (memory_dt and memory_dt > 0):
            raise DomainError('a memory kernel needs its sample spacing memory_dt > 0')
        self.b = float(b)
        self.k_spring = float(k_spring)
        self.eta = float(eta)
        self.memory = None if memory is None else np.asarray(memory, dtype=float)
        self.memory_dt = memory_dt
        self.drive = drive if drive is not None else Drive()
        self.mass = mass

    def __repr__(self):
        return 'EquationOfMotion(b={}, k_spring={}, eta={}, memory={}, mass={}, {!r})'.format(
            self.b, self.k_spring, self.eta, self.memory is not None, self.mass, self.drive)

    @property
    def massless(self) -> bool:
        return self.mass is None

    @classmethod
    def with_memory(cls, b: float, k_spring: float, jsamples: JSamples, dt: float, steps: int,
                    drive: Optional[Drive] = None) -> 'EquationOfMotion':
        """ Equation of motion whose friction is the full memory kernel of `jsamples`, sampled at step dt """
        gamma = memory_kernel(jsamples, dt * np.arange(steps + 1))
        return cls(b, k_spring, eta=0.0, memory=gamma, memory_dt=dt, drive=drive)

    def response_matrix(self) -> np.ndarray:
        """ A = [[eta, B], [-B, eta]], so that eta v - B z x v = A v """
        return np.array([[self.eta, self.b], [-self.b, self.eta]])

    def timescale(self) -> Optional[float]:
        """ sqrt(B^2 + eta^2) / K, the inverse rate of the slowest massless mode; None when K = 0 """
        if self.k_spring == 0:
            return None
        return float(np.hypot(self.b, self.eta) / abs(self.k_spring))


class TrajectoryRecord:
    """ Vortex positions and velocities on a uniform time grid """

    def __init__(self, times, positions, velocities, metadata: Optional[dict] = None):
        self.times = np.asarray(times, dtype=float)
        self.positions = np.asarray(positions, dtype=float)
        self.velocities = np.asarray(velocities, dtype=float)
        self.metadata = dict(metadata or {})
        if self.positions.shape != (self.times.size, 2) or self.velocities.shape != self.positions.shape:
            raise DomainError('positions and velocities must have shape (len(times), 2)')

    def __repr__(self):
        return 'TrajectoryRecord(steps={}, dt={})'.format(self.times.size - 1, self.metadata.get('dt'))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.positions)) and np.all(np.isfinite(self.velocities)))

    def radius(self) -> np.ndarray:
        return np.hypot(self.positions[:, 0], self.positions[:, 1])

    def pinning_energy(self, k_spring: float) -> np.ndarray:
        """ (K / 2) |x|^2 along the trajectory """
        return 0.5 * k_spring * np.sum(self.positions ** 2, axis=1)

    def orbit_frequency(self) -> float:
        """ Slope of the unwrapped polar angle of the position, fitted over the whole trajectory """
        angle = np.unwrap(np.arctan2(self.positions[:, 1], self.positions[:, 0]))
        return float(np.polyfit(self.times, angle, 1)[0])

    def decay_rate(self) -> float:
        """ Slope of -ln|x| fitted over the whole trajectory """
        return float(-np.polyfit(self.times, np.log(self.radius()), 1)[0])

    def steady_velocity(self) -> np.ndarray:
        return self.velocities[-1].copy()


def _check_step(eom: EquationOfMotion, dt: float):
    scale = eom.timescale()
    if eom.massless and scale is not None and dt > 0.1 * scale:
        raise DomainError(f'dt = {dt} does not resolve the dynamical time {scale:.4g}; use dt <= {0.1 * scale:.4g}')
    if eom.memory is not None and abs(eom.memory_dt - dt) > 1e-12 * dt:
        raise DomainError(f'memory kernel spacing {eom.memory_dt} does not match the step {dt}')


def _crank_nicolson(operator: np.ndarray, forcing, y0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """ Crank-Nicolson steps of y' = L y + b(t) """
    dt = times[1] - times[0]
    eye = np.eye(operator.shape[0])
    lhs = eye - 0.5 * dt * operator
    rhs = eye + 0.5 * dt * operator
    ys = np.empty((times.size, y0.size))
    ys[0] = y0
    b_prev = forcing(times[0])
    for n in range(times.size - 1):
        b_next = forcing(times[n + 1])
        ys[n + 1] = np.linalg.solve(lhs, rhs @ ys[n] + 0.5 * dt * (b_prev + b_next))
        b_prev = b_next
    return ys


def _integrate_memory(eom: EquationOfMotion, x0: np.ndarray, times: np.ndarray):
    """
    Trapezoidal history convolution. With C = A + (dt / 2) gamma(0) the velocity solves
    C v_n = F_n - K x_n - h_n, where h_n collects the earlier history, and x advances by the trapezoid rule.
    """
    dt = times[1] - times[0]
    gamma = eom.memory
    steps = times.size - 1
    if gamma.size < steps + 1:
        logger.debug(f'memory kernel has {gamma.size} samples; treating gamma as zero beyond t = {gamma.size * dt}')
        gamma = np.concatenate([gamma, np.zeros(steps + 1 - gamma.size)])
    c = eom.response_matrix() + 0.5 * dt * gamma[0] * np.eye(2)
    if abs(np.linalg.det(c)) < 1e-300:
        raise DomainError('no dynamics defined without transverse or dissipative response')
    c_inv = np.linalg.inv(c)
    k = eom.k_spring
    xs = np.empty((times.size, 2))
    vs = np.empty((times.size, 2))
    xs[0] = x0
    vs[0] = c_inv @ (eom.drive(times[0]) - k * x0)
    step_matrix = np.eye(2) + 0.5 * dt * k * c_inv
    for n in range(steps):
        m = n + 1
        # h_m = dt [ sum_{j=1}^{m-1} gamma_{m-j} v_j + gamma_m v_0 / 2 ]
        history = dt * (gamma[m - 1:0:-1] @ vs[1:m] + 0.5 * gamma[m] * vs[0])
        rhs = xs[n] + 0.5 * dt * vs[n] + 0.5 * dt * c_inv @ (eom.drive(times[m]) - history)
        xs[m] = np.linalg.solve(step_matrix, rhs)
        vs[m] = c_inv @ (eom.drive(times[m]) - k * xs[m] - history)
    return xs, vs


def integrate(eom: EquationOfMotion, x_init, t_final: float, dt: float) -> TrajectoryRecord:
    """
    Integrates the vortex equation of motion from x(0) = x_init

    Parameters
    ----------
    eom : EquationOfMotion
        coefficients, drive and friction model
    x_init : array-like
        initial displacement (2-vector)
    t_final : float
        end time
    dt : float
        step; must resolve the dynamical time sqrt(B^2 + eta^2) / K

    Returns
    -------
    TrajectoryRecord
        positions and velocities on the uniform grid 0, dt, ..., with the step, scheme and energy-balance
        diagnostics in its metadata

    Raises
    ------
    DomainError
        if B = eta = 0 without memory (the velocity is undetermined), or dt is too coarse
    """
    x0 = np.asarray(x_init, dtype=float)
    if x0.shape != (2,):
        raise DomainError(f'initial position {x_init} must be a 2-vector')
    if not dt > 0 or not t_final > 0:
        raise DomainError(f'dt = {dt} and t_final = {t_final} must be > 0')
    has_memory = eom.memory is not None and np.any(eom.memory)
    if eom.b == 0 and eom.eta == 0 and not has_memory and eom.massless:
        raise DomainError('no dynamics defined without transverse or dissipative response')
    _check_step(eom, dt)
    steps = int(round(t_final / dt))
    times = dt * np.arange(steps + 1)
    a = eom.response_matrix()
    k = eom.k_spring

    if eom.memory is not None:
        scheme = 'trapezoidal-memory'
        xs, vs = _integrate_memory(eom, x0, times)
    elif eom.massless:
        scheme = 'crank-nicolson'
        a_inv = np.linalg.inv(a)
        xs = _crank_nicolson(-k * a_inv, lambda t: a_inv @ eom.drive(t), x0, times)
        vs = (a_inv @ (np.array([eom.drive(t) for t in times]) - k * xs).T).T
    else:
        scheme = 'crank-nicolson-mass'
        m = eom.mass
        operator = np.block([[np.zeros((2, 2)), np.eye(2)], [-k / m * np.eye(2), -a / m]])
        v0 = np.linalg.lstsq(a, eom.drive(0.0) - k * x0, rcond=None)[0] if np.any(a) else np.zeros(2)
        ys = _crank_nicolson(operator, lambda t: np.concatenate([np.zeros(2), eom.drive(t) / m]),
                             np.concatenate([x0, v0]), times)
        xs, vs = ys[:, :2], ys[:, 2:]

    record = TrajectoryRecord(times, xs, vs, {'dt': dt, 'scheme': scheme, 'seed': None})
    if not record.is_finite():
        raise DomainError('trajectory diverged; reduce dt')
    _energy_balance(eom, record)
    return record


def _energy_balance(eom: EquationOfMotion, record: TrajectoryRecord):
    """ Pinning energy must not grow without drive, and must stay constant without friction """
    if not eom.drive.vanishes or not eom.massless or eom.k_spring == 0:
        return
    energy = record.pinning_energy(eom.k_spring)
    e0 = energy[0]
    if e0 == 0:
        record.metadata.update({'energy_monotone': True, 'energy_drift': 0.0})
        return
    monotone = bool(np.all(np.diff(energy) <= 1e-10 * e0))
    drift = float(np.max(np.abs(energy - e0)) / e0)
    record.metadata.update({'energy_monotone': monotone, 'energy_drift': drift})
    if not monotone:
        logger.warning('pinning energy increased during an undriven run')
    frictionless = eom.eta == 0 and (eom.memory is None or not np.any(eom.memory))
    if frictionless and drift > 1e-6:
        logger.warning(f'pinning energy drifted by {drift:.2e} without friction')


def hall_angle(eom: EquationOfMotion) -> float:
    """
    arctan2(B, eta): angle between a constant drive and the steady velocity v = (eta F + B z x F) / (eta^2 + B^2)
    at K = 0
    """
    if not (np.isfinite(eom.b) and np.isfinite(eom.eta)):
        raise DomainError('B and eta must be finite')
    if eom.b == 0 and eom.eta == 0:
        raise DomainError('no dynamics defined without transverse or dissipative response')
    return float(np.arctan2(eom.b, eom.eta))
