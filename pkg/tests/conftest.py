import numpy as np
import pytest

from mhbounds import mesh as meshmod
from mhbounds.femcore import FemContext


@pytest.fixture(scope="session")
def mesh2():
    return meshmod.build(2)


@pytest.fixture(scope="session")
def mesh8():
    return meshmod.build(8)


@pytest.fixture(scope="session")
def mesh16():
    return meshmod.build(16)


@pytest.fixture(scope="session")
def ctx2(mesh2):
    return FemContext(mesh2)


@pytest.fixture(scope="session")
def ctx8(mesh8):
    return FemContext(mesh8)


@pytest.fixture(scope="session")
def ctx16(mesh16):
    return FemContext(mesh16)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
