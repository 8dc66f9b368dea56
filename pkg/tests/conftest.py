import pytest

from privacy.noise import calibrate_element_wise, calibrate_row_wise
from privacy.rng import RngSeed, generator
from privacy.types import DataMatrix


@pytest.fixture
def seed() -> RngSeed:
    return RngSeed(seed=20240601, stream_id=0)


@pytest.fixture
def small_data(seed) -> DataMatrix:
    return DataMatrix(generator(seed).normal(size=(6, 8)))


@pytest.fixture
def element_params():
    return calibrate_element_wise(k=3, epsilon=4.0, d=8)


@pytest.fixture
def row_params():
    return calibrate_row_wise(k=3, epsilon=4.0, alpha=1.0, t_multiplier=2.0)
