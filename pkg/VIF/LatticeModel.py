import logging
import numbers
import numpy as np
import scipy.sparse as sp
from typing import Optional
# VIF imports
from VIF.LatticeObj import LatticeObj, frozen
from VIF.Disorder import DisorderSpec
from VIF.XY import XY
from VIF.errors import ConfigurationError

logger = logging.getLogger(__name__)


class LatticeModel(LatticeObj):
    """
    Square-lattice discretization of the single-particle problem. The kinetic term is the 5-point stencil
    with hopping t_hop, so that

        (H psi)(s) = -t_hop * sum_{nearest neighbors s'} psi(s') + (V(s) - mu) psi(s)

    Sites are flattened in C order, s = iy * nx + ix, and sit at (ix * a, iy * a). Instances are
    immutable after construction and safe to share between workers.
    """
    valid_boundaries = ('open', 'periodic')

    def __init__(self,
                 nx: int,
                 ny: int,
                 a: float = 1.0,
                 t_hop: float = 1.0,
                 mu: float = 0.0,
                 boundary: str = 'open',
                 potential=None,
                 disorder: Optional[DisorderSpec] = None,
                 ):
        """
        Parameters
        ----------
        nx, ny : int
            site counts per axis, both >= 4
        a : float
            lattice spacing
        t_hop : float
            hopping energy, ħ²/(2 m a²)
        mu : float
            chemical potential
        boundary : str
            'open' (default) or 'periodic'
        potential : array-like or None
            per-site impurity energies. Zero when None
        disorder : DisorderSpec or None
            the spec `potential` was drawn from, kept for bookkeeping
        """
        _check_count('lattice.nx', nx)
        _check_count('lattice.ny', ny)
        super().__init__(nx, ny)
        if not isinstance(a, numbers.Real) or not np.isfinite(a) or a <= 0:
            raise ConfigurationError('lattice.a', f'{a} must be a finite number > 0')
        if not isinstance(t_hop, numbers.Real) or not np.isfinite(t_hop) or t_hop <= 0:
            raise ConfigurationError('lattice.t_hop', f'{t_hop} must be a finite number > 0')
        if not isinstance(mu, numbers.Real) or not np.isfinite(mu):
            raise ConfigurationError('lattice.mu', f'{mu} must be a finite number')
        if boundary not in LatticeModel.valid_boundaries:
            raise ConfigurationError('lattice.boundary', f'{boundary} must be one of {LatticeModel.valid_boundaries}')

        self._a = float(a)
        self._t_hop = float(t_hop)
        self._mu = float(mu)
        self._boundary = boundary
        self._disorder = disorder if disorder is not None else DisorderSpec()

        if potential is None:
            potential = np.zeros(self.n_sites)
        potential = np.asarray(potential, dtype=float)
        if potential.shape != (self.n_sites,):
            raise ConfigurationError('lattice.potential',
                                     f'length {potential.size} does not match nx*ny = {self.n_sites}')
        if not np.all(np.isfinite(potential)):
            raise ConfigurationError('lattice.potential', 'contains non-finite values')
        self._potential = frozen(potential, float)
        self._hamiltonian = None

    def __repr__(self):
        return 'LatticeModel(nx={}, ny={}, a={}, t_hop={}, mu={}, boundary={!r}, {!r})'.format(
            self.nx, self.ny, self.a, self.t_hop, self.mu, self.boundary, self.disorder)

    """ Properties """

    @property
    def nx(self) -> int:
        return self._nx

    @property
    def ny(self) -> int:
        return self._ny

    @property
    def a(self) -> float:
        return self._a

    @property
    def t_hop(self) -> float:
        return self._t_hop

    @property
    def mu(self) -> float:
        return self._mu

    @property
    def boundary(self) -> str:
        return self._boundary

    @property
    def potential(self) -> np.ndarray:
        return self._potential

    @property
    def disorder(self) -> DisorderSpec:
        return self._disorder

    @property
    def area(self) -> float:
        return self.n_sites * self.a ** 2

    @property
    def energy_scale(self) -> float:
        """ Largest single-particle energy magnitude the stencil can produce """
        return 4 * self.t_hop + abs(self.mu) + float(np.max(np.abs(self.potential)))

    """ Geometry """

    def site_index(self, ix, iy):
        """ Flat site index of (ix, iy); accepts scalars or integer arrays """
        return np.asarray(iy) * self.nx + np.asarray(ix)

    def site_coordinates(self):
        """
        Returns
        -------
        xs, ys : np.ndarray
            flat arrays with the coordinates of every site
        """
        iy, ix = np.divmod(np.arange(self.n_sites), self.nx)
        return ix * self.a, iy * self.a

    def contains(self, point, margin: float = 0.0) -> bool:
        """ True if `point` lies strictly inside the lattice rectangle shrunk by `margin` """
        x, y = XY(point)
        x_max = (self.nx - 1) * self.a
        y_max = (self.ny - 1) * self.a
        return margin < x < x_max - margin and margin < y < y_max - margin

    def boundary_distance(self, point) -> float:
        """ Distance from `point` to the nearest edge of the lattice rectangle """
        x, y = XY(point)
        return min(x, y, (self.nx - 1) * self.a - x, (self.ny - 1) * self.a - y)

    def default_center(self) -> XY:
        """ Plaquette center closest to the middle of the lattice """
        return XY([(np.floor((self.nx - 1) / 2) + 0.5) * self.a,
                   (np.floor((self.ny - 1) / 2) + 0.5) * self.a])

    """ Operators """

    def _chain(self, n: int):
        """ Hopping matrix of a 1D chain of n sites """
        hop = sp.diags([-self.t_hop * np.ones(n - 1), -self.t_hop * np.ones(n - 1)], [-1, 1], format='lil')
        if self.boundary == 'periodic':
            hop[0, n - 1] = -self.t_hop
            hop[n - 1, 0] = -self.t_hop
        return hop.tocsr()

    def kinetic(self) -> sp.csr_matrix:
        """ 5-point stencil hopping matrix, sparse N x N """
        eye_x = sp.identity(self.nx, format='csr')
        eye_y = sp.identity(self.ny, format='csr')
        return (sp.kron(eye_y, self._chain(self.nx)) + sp.kron(self._chain(self.ny), eye_x)).tocsr()

    def hamiltonian(self) -> sp.csr_matrix:
        """ Normal-state block H = kinetic + V - mu, sparse and real symmetric """
        if self._hamiltonian is None:
            h = self.kinetic() + sp.diags(self.potential - self.mu)
            self._hamiltonian = h.tocsr()
        return self._hamiltonian

    def stencil_energies(self) -> np.ndarray:
        """
        Closed-form eigenvalues of H for the clean lattice, sorted ascending. Only defined when the
        potential vanishes

        Returns
        -------
        np.ndarray
            -2 t (cos kx a + cos ky a) - mu on the allowed wave vectors of the boundary condition
        """
        if np.any(self.potential != 0):
            raise ValueError('stencil energies are only defined for a clean lattice')
        if self.boundary == 'periodic':
            kx = 2 * np.pi * np.arange(self.nx) / self.nx
            ky = 2 * np.pi * np.arange(self.ny) / self.ny
        else:
            kx = np.pi * np.arange(1, self.nx + 1) / (self.nx + 1)
            ky = np.pi * np.arange(1, self.ny + 1) / (self.ny + 1)
        energies = -2 * self.t_hop * (np.cos(kx)[None, :] + np.cos(ky)[:, None]) - self.mu
        return np.sort(energies.ravel())

    def export_fields(self) -> dict:
        xs, ys = self.site_coordinates()
        iy, ix = np.divmod(np.arange(self.n_sites), self.nx)
        return {'ix': ix, 'iy': iy, 'x': xs, 'y': ys, 'potential': self.potential}


def _check_count(field: str, value):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 4:
        raise ConfigurationError(field, f'{value} must be an integer >= 4')


def build_lattice(nx: int,
                  ny: int,
                  a: float = 1.0,
                  t_hop: float = 1.0,
                  mu: float = 0.0,
                  boundary: str = 'open',
                  disorder: Optional[DisorderSpec] = None,
                  ) -> LatticeModel:
    """
    Builds a LatticeModel whose impurity potential is drawn from `disorder`

    Raises
    ------
    ConfigurationError
        naming the offending field when a parameter is out of range
    """
    disorder = disorder if disorder is not None else DisorderSpec()
    _check_count('lattice.nx', nx)
    _check_count('lattice.ny', ny)
    potential = disorder.realize(nx * ny)
    logger.debug(f'Built {nx}x{ny} {boundary} lattice, {disorder}')
    return LatticeModel(nx, ny, a=a, t_hop=t_hop, mu=mu, boundary=boundary, potential=potential, disorder=disorder)
