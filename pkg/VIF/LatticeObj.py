import abc
import numpy as np


class LatticeObj(metaclass=abc.ABCMeta):
    """
    Abstract class for objects that carry one value per lattice site
    """
    def __init__(self, nx: int, ny: int):
        self._nx = int(nx)
        self._ny = int(ny)

    def __getitem__(self, item):
        """
        Allows for access of the exported site fields without typing .export_fields()[item]
        """
        return self.export_fields()[str(item)]

    @property
    def site_shape(self):
        """ (ny, nx): shape of a site field laid out as an image, row index = y """
        return self._ny, self._nx

    @property
    def n_sites(self) -> int:
        return self._nx * self._ny

    def as_image(self, values) -> np.ndarray:
        """ Reshapes a flat per-site array into (ny, nx) """
        values = np.asarray(values)
        if values.shape != (self.n_sites,):
            raise ValueError(f'expected {self.n_sites} site values, got shape {values.shape}')
        return values.reshape(self.site_shape)

    @abc.abstractmethod
    def export_fields(self) -> dict:
        """
        This method should return a dict of flat per-site arrays, keyed by column name. These are the
        columns written to the site tables of the run artifacts
        """
        pass


def frozen(values, dtype) -> np.ndarray:
    """ Returns a read-only copy of `values` """
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr
