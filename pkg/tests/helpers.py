"""
helpers.py

Synthetic configurations whose kernels are known in closed form.
"""
import numpy as np
from VIF.Spectrum import BdGSpectrum, occupations
from VIF.ForceMatrix import ForceMatrixElements


def two_level(m0: float = 0.3, gap: float = 2.0, beta: float = np.inf):
    """
    Two states at -gap/2 and +gap/2 coupled by M^x = m0 sigma_x, M^y = m0 sigma_y, so the single line at
    omega = gap carries weight pi m0^2 at zero temperature
    """
    spectrum = occupations(BdGSpectrum([-gap / 2, gap / 2], np.eye(2)), beta)
    mx = np.array([[0, m0], [m0, 0]], dtype=complex)
    my = np.array([[0, -1j * m0], [1j * m0, 0]], dtype=complex)
    elements = ForceMatrixElements(mx, my, 0.01, (np.zeros(1), np.zeros(1)))
    return elements, spectrum


def cluster_rotation(spectrum, tol: float, seed: int = 7) -> np.ndarray:
    """ Block-diagonal random unitary acting inside every cluster of states closer than `tol` in energy """
    rng = np.random.default_rng(seed)
    w = np.eye(len(spectrum), dtype=complex)
    for cluster in spectrum.clusters(tol):
        if cluster.size > 1:
            z = rng.normal(size=(cluster.size, cluster.size)) + 1j * rng.normal(size=(cluster.size, cluster.size))
            q, r = np.linalg.qr(z)
            w[np.ix_(cluster, cluster)] = q * (np.diag(r) / np.abs(np.diag(r)))
    return w
