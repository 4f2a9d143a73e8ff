import numpy as np
import pytest

from mingraphs import lw_family, planar_pair, reconstruct_u

WINDOW = ((0.5, 3.0), (-2.0, 2.0))


@pytest.fixture(scope="session")
def lw15():
    return lw_family(1.5)


@pytest.fixture(scope="session")
def planar22():
    return planar_pair(2.0, 2.0)


@pytest.fixture(scope="session")
def field32(lw15):
    return reconstruct_u(lw15, WINDOW, 1.0 / 32.0)


@pytest.fixture(scope="session")
def field64(lw15):
    return reconstruct_u(lw15, WINDOW, 1.0 / 64.0)


@pytest.fixture(scope="session")
def planar_field(planar22):
    return reconstruct_u(planar22, ((0.0, 3.0), (-2.0, 2.0)), 0.25)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)
