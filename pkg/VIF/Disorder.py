import numbers
import numpy as np
from VIF.errors import ConfigurationError


class DisorderSpec:
    """
    Describes one realization of the quenched impurity potential V(x). Impurities sit on a random
    fraction `density` of the sites; their strength is drawn uniformly from [-strength, strength]
    (kind='box') or from a normal distribution of width `strength` (kind='gaussian')
    """
    valid_kinds = ('box', 'gaussian')

    def __init__(self, strength: float = 0.0, density: float = 1.0, seed: int = 0, kind: str = 'box'):
        self._strength = None
        self._density = None
        self._seed = None
        self._kind = None

        self.strength = strength
        self.density = density
        self.seed = seed
        self.kind = kind

    def __repr__(self):
        return 'DisorderSpec(strength={}, density={}, seed={}, kind={!r})'.format(
            self.strength, self.density, self.seed, self.kind)

    def __eq__(self, other):
        if not isinstance(other, DisorderSpec):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    @classmethod
    def from_dict(cls, params: dict) -> 'DisorderSpec':
        return cls(strength=params.get('strength', 0.0),
                   density=params.get('density', 1.0),
                   seed=params.get('seed', 0),
                   kind=params.get('kind', 'box'))

    def to_dict(self) -> dict:
        return dict(strength=self.strength, density=self.density, seed=self.seed, kind=self.kind)

    """ Properties """

    @property
    def strength(self) -> float:
        return self._strength

    @strength.setter
    def strength(self, value):
        if not isinstance(value, numbers.Real) or not np.isfinite(value) or value < 0:
            raise ConfigurationError('disorder.strength', f'{value} must be a finite number >= 0')
        self._strength = float(value)

    @property
    def density(self) -> float:
        return self._density

    @density.setter
    def density(self, value):
        if not isinstance(value, numbers.Real) or not 0 <= value <= 1:
            raise ConfigurationError('disorder.density', f'{value} must lie in [0, 1]')
        self._density = float(value)

    @property
    def seed(self) -> int:
        return self._seed

    @seed.setter
    def seed(self, value):
        if isinstance(value, bool) or not isinstance(value, numbers.Integral) or not 0 <= value < 2 ** 64:
            raise ConfigurationError('disorder.seed', f'{value} must be an unsigned 64-bit integer')
        self._seed = int(value)

    @property
    def kind(self) -> str:
        return self._kind

    @kind.setter
    def kind(self, value):
        if value not in DisorderSpec.valid_kinds:
            raise ConfigurationError('disorder.kind', f'{value} must be one of {DisorderSpec.valid_kinds}')
        self._kind = value

    """ Utility Methods """

    def realize(self, n_sites: int) -> np.ndarray:
        """
        Draws the potential for `n_sites` sites. The same spec always yields a bit-identical array

        Parameters
        ----------
        n_sites : int
            number of lattice sites

        Returns
        -------
        potential : np.ndarray
            real per-site impurity energies
        """
        if self.strength == 0 or self.density == 0:
            return np.zeros(n_sites)
        rng = np.random.default_rng(self.seed)
        # Both draws always happen so the impurity positions do not depend on the kind
        occupied = rng.random(n_sites) < self.density
        if self.kind == 'box':
            values = rng.uniform(-self.strength, self.strength, n_sites)
        else:
            values = rng.normal(0.0, self.strength, n_sites)
        return np.where(occupied, values, 0.0)
