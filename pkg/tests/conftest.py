import numpy as np
import pytest
from hypothesis import settings

from psido import catalog
from psido.quantize import GridContext
from psido.sobolev import build_pack

settings.register_profile("psido", max_examples=25, deadline=None)
settings.load_profile("psido")


@pytest.fixture(scope="session")
def grid():
    return GridContext(256)


@pytest.fixture(scope="session")
def small_grid():
    return GridContext(64)


@pytest.fixture(scope="session")
def c2():
    return catalog.c2_symbol()


@pytest.fixture(scope="session")
def pack(grid):
    return build_pack(grid, ())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
