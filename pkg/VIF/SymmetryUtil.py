"""
Point-group helpers for the square lattice: orientation matrices and the site permutations they
induce about a vortex center
"""
import numpy as np
from typing import TYPE_CHECKING
if TYPE_CHECKING:
    from VIF.LatticeModel import LatticeModel

valid_orientation = ('R0', 'R90', 'R180', 'R270', 'MX', 'MY', 'MXY')

# Rotation angle associated with each proper rotation, used to predict the pair-field phase
rotation_angle = {'R0': 0.0, 'R90': np.pi / 2, 'R180': np.pi, 'R270': 3 * np.pi / 2}


def Mt(transform):
    """
    Get transform matrix

    Parameters
    ----------
    transform : str
        transform parameter. possible values are 'R0', 'R90', 'R180', 'R270', 'MX', 'MY' and 'MXY'

    Returns
    -------
    np.array([[int, int], [int, int]])
        transform matrix
    """
    if transform == 'R0':
        return np.array([[1, 0], [0, 1]])
    if transform == 'R90':
        return np.array([[0, -1], [1, 0]])
    if transform == 'R180':
        return np.array([[-1, 0], [0, -1]])
    if transform == 'R270':
        return np.array([[0, 1], [-1, 0]])
    if transform == 'MX':
        return np.array([[1, 0], [0, -1]])
    if transform == 'MY':
        return np.array([[-1, 0], [0, 1]])
    if transform == 'MXY':  # mirror to y=x line
        return np.array([[0, 1], [1, 0]])
    raise ValueError(f'{transform} is not a valid orientation')


def rotation_permutation(model: 'LatticeModel', center, orient: str = 'R90') -> np.ndarray:
    """
    Site map of a lattice symmetry operation about `center`

    Parameters
    ----------
    model : LatticeModel
        lattice whose sites are permuted
    center : XY or (float, float)
        fixed point of the operation
    orient : str
        one of `valid_orientation`

    Returns
    -------
    perm : np.ndarray
        integer array with perm[s] = index of the image of site s

    Raises
    ------
    ValueError
        if the operation does not map the lattice onto itself
    """
    xs, ys = model.site_coordinates()
    rel = np.stack([xs - center[0], ys - center[1]])
    img = np.matmul(Mt(orient), rel)
    ix = np.rint((img[0] + center[0]) / model.a).astype(int)
    iy = np.rint((img[1] + center[1]) / model.a).astype(int)
    off_grid = (np.abs(img[0] + center[0] - ix * model.a) > 1e-9 * model.a) | \
               (np.abs(img[1] + center[1] - iy * model.a) > 1e-9 * model.a)
    outside = (ix < 0) | (ix >= model.nx) | (iy < 0) | (iy >= model.ny)
    if np.any(off_grid | outside):
        raise ValueError(f'{orient} about {tuple(center)} does not map the lattice onto itself')
    return model.site_index(ix, iy)
