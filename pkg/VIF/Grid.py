import numpy as np
from VIF.errors import DomainError


class UniformGrid:
    """
    Evenly spaced samples origin, origin + spacing, ..., origin + (count - 1) * spacing
    """
    def __init__(self, spacing, count, origin=0.0):
        self._spacing = None
        self._count = None
        self._origin = None

        self.spacing = spacing
        self.count = count
        self.origin = origin

    """ Magic Methods """
    def __len__(self):
        return self.count

    def __str__(self):
        return f'UniformGrid:\n\torigin: {self.origin}\n\tspacing: {self.spacing}\n\tcount: {self.count}\n'

    @classmethod
    def from_range(cls, start: float, stop: float, count: int) -> 'UniformGrid':
        """ Grid of `count` samples from `start` to `stop` inclusive """
        if count < 2 or not stop > start:
            raise DomainError(f'cannot build a grid of {count} samples on [{start}, {stop}]')
        return cls(spacing=(stop - start) / (count - 1), count=count, origin=start)

    @classmethod
    def covering(cls, start: float, stop: float, spacing: float) -> 'UniformGrid':
        """ Smallest grid with the given spacing that starts at `start` and reaches at least `stop` """
        count = int(np.ceil((stop - start) / spacing - 1e-9)) + 1
        return cls(spacing=spacing, count=max(count, 2), origin=start)

    """ Properties """
    @property
    def spacing(self) -> float:
        return self._spacing

    @spacing.setter
    def spacing(self, value):
        if not np.isfinite(value) or value <= 0:
            raise DomainError(f'grid spacing {value} must be a finite number > 0')
        self._spacing = float(value)

    @property
    def count(self) -> int:
        return self._count

    @count.setter
    def count(self, value):
        if int(value) != value or value < 2:
            raise DomainError(f'grid count {value} must be an integer >= 2')
        self._count = int(value)

    @property
    def origin(self) -> float:
        return self._origin

    @origin.setter
    def origin(self, value):
        self._origin = float(value)

    @property
    def stop(self) -> float:
        return self.get_sample(self.count - 1)

    @property
    def values(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.count)

    """ Utility Methods """
    def get_sample(self, num) -> float:
        """ Value of sample `num`; negative numbers count from the end as in a list """
        if num < 0:
            num += self.count
        if not 0 <= num < self.count:
            raise IndexError(f'sample {num} is outside a grid of {self.count}')
        return self.origin + num * self.spacing
