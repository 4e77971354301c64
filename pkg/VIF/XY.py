import numbers
import numpy as np
# VIF imports
from VIF.SymmetryUtil import Mt


class XY:
    """
    Primitive class to describe a single point (or displacement) on the xy plane in lattice units,
    with the vector arithmetic needed to move vortex centers around
    """

    def __init__(self, xy):
        # Create the internal x and y variable names
        self._x = None
        self._y = None

        # Perform input conditioning before storing data
        if isinstance(xy, XY):
            self.xy = xy.xy
        elif len(xy) != 2:
            raise ValueError('{}:{} does not have length 2'.format(type(xy), xy))
        elif all([isinstance(xy[0], numbers.Real), isinstance(xy[1], numbers.Real)]):
            self.xy = xy
        else:
            raise TypeError('{} type does not represent a valid xy coordinate description'.format(type(xy)))

    """ Magic methods """

    def __repr__(self):
        return 'XY([{!r}, {!r}])'.format(self.x, self.y)

    def __str__(self):
        return '[{}, {}]'.format(self.x, self.y)

    def __len__(self):
        return 2

    def __iter__(self):
        yield self.x
        yield self.y

    def __getitem__(self, item):
        """ Treat the xy coordinate as either an indexed array or dictionary when getting values"""
        if item == 0 or item == 'x':
            return self.x
        elif item == 1 or item == 'y':
            return self.y
        else:
            raise ValueError('{} is an invalid coordinate index'.format(item))

    def __eq__(self, other):
        try:
            other = XY(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __add__(self, other):
        """ Treats coordinates as vectors, performs vector addition """
        other_temp = XY(other)
        return XY([self.x + other_temp.x, self.y + other_temp.y])

    def __radd__(self, other):
        return self.__add__(other)

    def __mul__(self, other):
        """ Scales the vector by a real number """
        if isinstance(other, numbers.Real):
            return XY([self.x * other, self.y * other])
        return NotImplemented

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return XY([-self.x, -self.y])

    def __sub__(self, other):
        """ Treats coordinates as vectors, performs subtraction """
        return self + (-XY(other))

    def __rsub__(self, other):
        return XY(other) - self

    """ Getters and Setters """

    @property
    def x(self) -> float:
        return self._x

    @x.setter
    def x(self, value):
        self._x = float(value)

    @property
    def y(self) -> float:
        return self._y

    @y.setter
    def y(self, value):
        self._y = float(value)

    @property
    def xy(self):
        return [self.x, self.y]

    @xy.setter
    def xy(self, xy):
        self.x = xy[0]
        self.y = xy[1]

    """ Utility Functions """

    def norm(self) -> float:
        return float(np.hypot(self.x, self.y))

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def transform(self, origin=(0, 0), orient='R0') -> 'XY':
        """ Rotates/mirrors the point about `origin` """
        origin = XY(origin)
        rel = (self - origin).to_array()
        new_xy = np.matmul(Mt(orient), rel)
        return XY(new_xy) + origin
