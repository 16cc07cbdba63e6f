import numpy as np
import pytest

from levy_area.core.gaussian_source import GaussianSource
from levy_area.core.types import StandardizedIncrement, WienerIncrement


@pytest.fixture
def src() -> GaussianSource:
    return GaussianSource(20240521)


@pytest.fixture
def rng() -> np.random.Generator:
    # test data only, never a library source
    return np.random.default_rng(7)


@pytest.fixture
def increment(rng):
    """Factory for random Wiener increments W_h ~ N(0, h I_m)."""

    def make(m: int, h: float = 1.0) -> WienerIncrement:
        return WienerIncrement(np.sqrt(h) * rng.standard_normal(m), h)

    return make


@pytest.fixture
def standardized(rng):
    def make(m: int) -> StandardizedIncrement:
        return StandardizedIncrement(rng.standard_normal(m))

    return make
