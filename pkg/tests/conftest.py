"""
conftest.py

Shared fixtures: a small clean lattice carrying the tanh vortex ansatz and its BdG spectrum.
"""
from pathlib import Path
import numpy as np
import pytest
from VIF.LatticeModel import build_lattice
from VIF.PairField import seed_pair_field
from VIF.BdGMatrix import assemble_bdg
from VIF.Spectrum import diagonalize, occupations

SPEC_DIR = Path(__file__).parent / 'specs'


@pytest.fixture(scope='module')
def clean_model():
    return build_lattice(10, 10)


@pytest.fixture(scope='module')
def vortex(clean_model):
    return seed_pair_field(clean_model, q=1, bulk_gap=0.6, xi=2.0)


@pytest.fixture(scope='module')
def vortex_spectrum(clean_model, vortex):
    return occupations(diagonalize(assemble_bdg(clean_model, vortex)), np.inf)


@pytest.fixture
def spec_dir():
    return SPEC_DIR
