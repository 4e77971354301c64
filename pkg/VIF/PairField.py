"""
Vortex-carrying pair field Delta(x) and the operations acting on it: seeding the tanh ansatz, rigid
displacement of the vortex center and phase-winding bookkeeping
"""
import logging
import numbers
import numpy as np
from scipy import ndimage
from typing import Optional
# VIF imports
from VIF.LatticeObj import LatticeObj, frozen
from VIF.LatticeModel import LatticeModel
from VIF.XY import XY
from VIF.SymmetryUtil import rotation_permutation, rotation_angle
from VIF.errors import DomainError

logger = logging.getLogger(__name__)

# Amplitude below which the phase of the field is not trusted for winding checks
PHASE_FLOOR = 1e-10


class PairField(LatticeObj):
    """
    Complex order parameter on the sites of `model`, carrying a vortex of winding `winding` at `center`.

    `profile` is 'ansatz' when the field is the closed form bulk_gap * tanh(r / xi) * exp(i q theta),
    and 'sampled' for any other field (e.g. after self-consistency). Displacement is exact for the ansatz
    and interpolated for sampled fields.
    """
    valid_profiles = ('ansatz', 'sampled')

    def __init__(self,
                 model: LatticeModel,
                 delta,
                 center,
                 winding: int,
                 bulk_gap: float,
                 coherence_length: float,
                 profile: str = 'sampled',
                 ):
        super().__init__(model.nx, model.ny)
        delta = np.asarray(delta, dtype=complex)
        if delta.shape != (model.n_sites,):
            raise DomainError(f'pair field has {delta.size} values, lattice has {model.n_sites} sites')
        if winding not in (-1, 0, 1):
            raise DomainError(f'winding {winding} must be one of -1, 0, +1')
        if winding != 0 and model.boundary == 'periodic':
            raise DomainError('a single vortex is inconsistent with periodic boundaries; use q = 0')
        if profile not in PairField.valid_profiles:
            raise DomainError(f'{profile} must be one of {PairField.valid_profiles}')
        if not isinstance(coherence_length, numbers.Real) or coherence_length <= 0:
            raise DomainError(f'coherence length {coherence_length} must be > 0')
        if bulk_gap < 0:
            raise DomainError(f'bulk gap {bulk_gap} must be >= 0')

        self._model = model
        self._delta = frozen(delta, complex)
        self._center = XY(center)
        self._winding = int(winding)
        self._bulk_gap = float(bulk_gap)
        self._coherence_length = float(coherence_length)
        self._profile = profile

    def __repr__(self):
        return 'PairField(center={}, q={}, bulk_gap={}, xi={}, profile={!r})'.format(
            self.center, self.winding, self.bulk_gap, self.coherence_length, self.profile)

    """ Properties """

    @property
    def model(self) -> LatticeModel:
        return self._model

    @property
    def delta(self) -> np.ndarray:
        return self._delta

    @property
    def center(self) -> XY:
        return self._center

    @property
    def winding(self) -> int:
        return self._winding

    @property
    def bulk_gap(self) -> float:
        return self._bulk_gap

    @property
    def coherence_length(self) -> float:
        return self._coherence_length

    @property
    def profile(self) -> str:
        return self._profile

    @property
    def degenerate(self) -> bool:
        """ True when the field vanishes identically, in which case its winding is undefined """
        return not np.any(self._delta)

    """ Construction helpers """

    def with_delta(self, delta) -> 'PairField':
        """ Same vortex parameters, new site values; the result is always a sampled field """
        return PairField(self.model, delta, self.center, self.winding, self.bulk_gap, self.coherence_length,
                         profile='sampled')

    def polar_angle(self, center=None) -> np.ndarray:
        """ theta(x - center) at every site """
        cx, cy = XY(center) if center is not None else self.center
        xs, ys = self.model.site_coordinates()
        return np.arctan2(ys - cy, xs - cx)

    def radius(self, center=None) -> np.ndarray:
        """ |x - center| at every site """
        cx, cy = XY(center) if center is not None else self.center
        xs, ys = self.model.site_coordinates()
        return np.hypot(xs - cx, ys - cy)

    """ Displacement """

    def displace(self, dx) -> 'PairField':
        """
        Rigidly translates the vortex by `dx`

        Parameters
        ----------
        dx : XY or (float, float)
            displacement of the vortex center

        Returns
        -------
        PairField
            field re-evaluated about center + dx

        Raises
        ------
        DomainError
            if the displaced center comes closer than 2a to an open boundary
        """
        dx = XY(dx)
        if dx.x == 0 and dx.y == 0:
            return self
        new_center = self.center + dx
        if self.model.boundary == 'open' and self.model.boundary_distance(new_center) < 2 * self.model.a:
            raise DomainError(f'displaced center {new_center} is closer than 2a to the boundary')
        if self.profile == 'ansatz':
            return seed_pair_field(self.model, new_center, self.winding, self.bulk_gap, self.coherence_length)
        return PairField(self.model, self._resample(dx), new_center, self.winding, self.bulk_gap,
                         self.coherence_length, profile='sampled')

    def _resample(self, dx: XY) -> np.ndarray:
        """
        Bilinear re-sampling of a sampled field at x - dx. The winding phase is stripped before the
        interpolation and restored about the displaced center, so only the smooth residual is interpolated
        """
        q = self.winding
        residual = self.delta * np.exp(-1j * q * self.polar_angle()) if q else self.delta
        img = self.as_image(residual)
        iy, ix = np.divmod(np.arange(self.n_sites), self.model.nx)
        coords = np.array([iy - dx.y / self.model.a, ix - dx.x / self.model.a])
        mode = 'grid-wrap' if self.model.boundary == 'periodic' else 'nearest'
        moved = (ndimage.map_coordinates(img.real, coords, order=1, mode=mode) +
                 1j * ndimage.map_coordinates(img.imag, coords, order=1, mode=mode))
        if q:
            moved = moved * np.exp(1j * q * self.polar_angle(self.center + dx))
        return moved

    def center_gradient(self, fd_step: float):
        """
        Central finite difference of the field with respect to the vortex center

        Returns
        -------
        (np.ndarray, np.ndarray)
            d Delta / d x0 and d Delta / d y0 at every site

        Notes
        -----
        A field without a vortex (q = 0) has no center coordinate; its gradient is identically zero.
        """
        if self.winding == 0:
            zero = np.zeros(self.n_sites, dtype=complex)
            return zero, zero.copy()
        if fd_step <= 0:
            raise DomainError(f'fd_step {fd_step} must be > 0')
        grads = []
        for step in (XY([fd_step, 0.0]), XY([0.0, fd_step])):
            plus = self.displace(step).delta
            minus = self.displace(-step).delta
            grads.append((plus - minus) / (2 * fd_step))
        return grads[0], grads[1]

    def analytic_center_gradient(self):
        """
        Closed-form center gradient of the tanh ansatz

        Returns
        -------
        (np.ndarray, np.ndarray)
            d Delta / d x0 and d Delta / d y0 at every site
        """
        if self.profile != 'ansatz':
            raise DomainError('the analytic gradient only exists for the tanh ansatz')
        cx, cy = self.center
        xs, ys = self.model.site_coordinates()
        rx, ry = xs - cx, ys - cy
        r = np.hypot(rx, ry)
        xi = self.coherence_length
        u = r / xi
        # d ln|Delta| / dr
        dlog_amp = 1.0 / (xi * np.sinh(u) * np.cosh(u))
        d_x0 = self.delta * (-dlog_amp * rx / r + 1j * self.winding * ry / r ** 2)
        d_y0 = self.delta * (-dlog_amp * ry / r - 1j * self.winding * rx / r ** 2)
        return d_x0, d_y0

    """ Export """

    def export_fields(self) -> dict:
        xs, ys = self.model.site_coordinates()
        iy, ix = np.divmod(np.arange(self.n_sites), self.model.nx)
        return {'ix': ix, 'iy': iy, 'x': xs, 'y': ys,
                'delta_re': self.delta.real, 'delta_im': self.delta.imag, 'delta_abs': np.abs(self.delta)}


def seed_pair_field(model: LatticeModel,
                    center=None,
                    q: int = 1,
                    bulk_gap: float = 0.6,
                    xi: float = 2.0,
                    ) -> PairField:
    """
    Samples the vortex ansatz Delta(x) = bulk_gap * tanh(|x - x0| / xi) * exp(i q theta(x - x0)) on the sites
    of `model`. q = 0 gives the uniform field bulk_gap.

    Parameters
    ----------
    model : LatticeModel
        lattice to sample on
    center : XY or None
        vortex center x0; the plaquette center nearest the middle of the lattice when None
    q : int
        winding, one of -1, 0, +1
    bulk_gap : float
        asymptotic amplitude, >= 0
    xi : float
        coherence length, > 0

    Raises
    ------
    DomainError
        if the center is not strictly inside the lattice or xi <= 0
    """
    if not isinstance(xi, numbers.Real) or not xi > 0:
        raise DomainError(f'coherence length {xi} must be > 0')
    if not isinstance(bulk_gap, numbers.Real) or not bulk_gap >= 0:
        raise DomainError(f'bulk gap {bulk_gap} must be >= 0')
    center = model.default_center() if center is None else XY(center)
    if not model.contains(center):
        raise DomainError(f'vortex center {center} is not strictly inside the lattice')
    if q == 0:
        delta = np.full(model.n_sites, bulk_gap, dtype=complex)
    else:
        cx, cy = center
        xs, ys = model.site_coordinates()
        r = np.hypot(xs - cx, ys - cy)
        theta = np.arctan2(ys - cy, xs - cx)
        delta = bulk_gap * np.tanh(r / xi) * np.exp(1j * q * theta)
    pair = PairField(model, delta, center, q, bulk_gap, xi, profile='ansatz')
    if pair.degenerate:
        logger.warning('Seeded pair field vanishes identically; its winding is undefined')
    return pair


def displace_pair_field(pair: PairField, dx) -> PairField:
    """ Rigid translation of the vortex by `dx`, see PairField.displace """
    return pair.displace(dx)


def square_loop(model: LatticeModel, ix_lo: int, iy_lo: int, side: int) -> np.ndarray:
    """
    Counter-clockwise closed loop of site indices around the square of `side` plaquettes whose lower-left
    corner is site (ix_lo, iy_lo)
    """
    ix_hi, iy_hi = ix_lo + side, iy_lo + side
    if side < 1 or ix_lo < 0 or iy_lo < 0 or ix_hi >= model.nx or iy_hi >= model.ny:
        raise DomainError(f'loop of side {side} at ({ix_lo}, {iy_lo}) does not fit in the lattice')
    bottom = [(ix, iy_lo) for ix in range(ix_lo, ix_hi)]
    right = [(ix_hi, iy) for iy in range(iy_lo, iy_hi)]
    top = [(ix, iy_hi) for ix in range(ix_hi, ix_lo, -1)]
    left = [(ix_lo, iy) for iy in range(iy_hi, iy_lo, -1)]
    ring = bottom + right + top + left
    return np.array([model.site_index(ix, iy) for ix, iy in ring], dtype=int)


def enclosing_loop(model: LatticeModel, center, half_width: int = 2) -> np.ndarray:
    """
    Square loop of 2 * half_width - 1 plaquettes per side around the plaquette containing `center`;
    half_width = 2 gives the ring around the 3x3 plaquette block centered on the vortex
    """
    cx, cy = XY(center)
    ix0 = int(np.floor(cx / model.a))
    iy0 = int(np.floor(cy / model.a))
    return square_loop(model, ix0 - half_width + 1, iy0 - half_width + 1, 2 * half_width - 1)


def loop_phase_sum(pair: PairField, loop) -> float:
    """ Sum of the wrapped phase differences of the field along the closed `loop` (radians) """
    if pair.degenerate:
        raise DomainError('the winding of an identically zero field is undefined')
    loop = np.asarray(loop, dtype=int)
    phase = np.angle(pair.delta[loop])
    steps = np.diff(np.append(phase, phase[0]))
    return float(np.sum(np.angle(np.exp(1j * steps))))


def winding_number(pair: PairField, loop, tol: float = 1e-6) -> int:
    """
    Integer phase winding of the field around `loop`

    Raises
    ------
    DomainError
        if the field vanishes identically, or the phase sum is not a multiple of 2 pi within `tol` radians
    """
    total = loop_phase_sum(pair, loop)
    n = int(np.rint(total / (2 * np.pi)))
    if abs(total - 2 * np.pi * n) > tol:
        raise DomainError(f'phase sum {total} around the loop is not quantized')
    return n


def loop_amplitude(pair: PairField, loop) -> float:
    """ Smallest |Delta| on the loop; phases below PHASE_FLOOR are not meaningful """
    return float(np.min(np.abs(pair.delta[np.asarray(loop, dtype=int)])))


def default_loop(pair: PairField) -> Optional[np.ndarray]:
    """
    Widest enclosing loop that stays two sites clear of the boundary, or None when the lattice is too small
    """
    model = pair.model
    room = int(np.floor(model.boundary_distance(pair.center) / model.a)) - 1
    half_width = max(1, room)
    try:
        return enclosing_loop(model, pair.center, half_width)
    except DomainError:
        return None


def rotation_error(pair: PairField, orient: str = 'R90') -> Optional[float]:
    """
    Largest |Delta(R x) - exp(i q phi_R) Delta(x)| relative to max |Delta| for the proper rotation `orient`
    about the vortex center. None when the rotation does not map the lattice onto itself or the field vanishes.
    """
    if orient not in rotation_angle:
        raise DomainError(f'{orient} is not a proper rotation, choose from {list(rotation_angle)}')
    if pair.degenerate:
        return None
    try:
        perm = rotation_permutation(pair.model, pair.center, orient)
    except ValueError:
        return None
    expected = np.exp(1j * pair.winding * rotation_angle[orient]) * pair.delta
    return float(np.max(np.abs(pair.delta[perm] - expected)) / np.max(np.abs(pair.delta)))
