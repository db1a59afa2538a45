import numpy as np
import pytest

from subplanck import Grid1D, cat_state, gaussian_packet, wigner_transform


@pytest.fixture(scope="session")
def gauss_grid():
    return Grid1D(-12.0, 12.0, 512)


@pytest.fixture(scope="session")
def gauss(gauss_grid):
    return gaussian_packet(gauss_grid, 0.0, 0.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def gauss_wigner(gauss):
    return wigner_transform(gauss)


@pytest.fixture(scope="session")
def cat_grid():
    # range exceeds twice the packet separation plus tails, so W^2 is
    # resolved on the momentum grid as well as W itself
    return Grid1D(-20.0, 20.0, 512)


@pytest.fixture(scope="session")
def cat8(cat_grid):
    return cat_state(cat_grid, 8.0, 1.0)


@pytest.fixture(scope="session")
def cat8_wigner(cat8):
    return wigner_transform(cat8)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20250810)
