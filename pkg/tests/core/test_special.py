import math

import pytest

from levy_area.core.errors import DegenerateDimensionError, LevyAreaValueError
from levy_area.core.special import norm_factor, tail_sum, trigamma_tail
from levy_area.core.types import ErrorNorm


def partial_sum_oracle(p: int) -> float:
    return math.pi**2 / 6.0 - math.fsum(1.0 / (r * r) for r in range(1, p + 1))


def test_trigamma_known_values():
    assert trigamma_tail(0) == pytest.approx(math.pi**2 / 6.0, rel=1e-12)
    assert trigamma_tail(1) == pytest.approx(math.pi**2 / 6.0 - 1.0, rel=1e-12)
    assert trigamma_tail(10) == pytest.approx(0.0951663357, abs=1e-10)


@pytest.mark.parametrize("p", [0, 1, 2, 10, 100, 1000, 10000])
def test_trigamma_matches_partial_sums(p):
    assert trigamma_tail(p) == pytest.approx(partial_sum_oracle(p), rel=1e-10)


@pytest.mark.parametrize("p", [10**6, 10**7, 10**8])
def test_trigamma_matches_asymptotic_expansion(p):
    z = p + 1.0
    assert trigamma_tail(p) == pytest.approx(1.0 / z + 1.0 / (2 * z**2) + 1.0 / (6 * z**3), rel=1e-10)


@pytest.mark.parametrize("p", [0, 1, 5, 99])
def test_trigamma_recurrence(p):
    assert trigamma_tail(p) - trigamma_tail(p + 1) == pytest.approx(1.0 / (p + 1) ** 2, rel=1e-12)


def test_trigamma_monotone_and_bounded():
    values = [trigamma_tail(p) for p in range(1, 200)]
    assert all(a > b for a, b in zip(values, values[1:]))
    for p in range(1, 200):
        assert 1.0 / (p + 1) <= trigamma_tail(p) <= 1.0 / p


def test_trigamma_rejects_negative():
    with pytest.raises(LevyAreaValueError):
        trigamma_tail(-1)


def test_tail_sum():
    assert tail_sum(10, 10) == 0.0
    assert tail_sum(12, 10) == 0.0
    assert tail_sum(2, 4) == pytest.approx(1.0 / 9 + 1.0 / 16, rel=1e-15)
    assert tail_sum(10, 10**4) == pytest.approx(trigamma_tail(10) - trigamma_tail(10**4), rel=1e-9)


def test_norm_factor_values():
    assert norm_factor(2, ErrorNorm.MAX_L2, ErrorNorm.FROBENIUS_L2) == pytest.approx(math.sqrt(2))
    assert norm_factor(1, ErrorNorm.MAX_L2, ErrorNorm.FROBENIUS_L2) == 0.0
    assert norm_factor(10, ErrorNorm.MAX_L2, ErrorNorm.FROBENIUS_L2) == pytest.approx(9.48683, abs=1e-5)
    assert norm_factor(7, ErrorNorm.FROBENIUS_L2, ErrorNorm.FROBENIUS_L2) == 1.0


@pytest.mark.parametrize("m", [2, 3, 10, 1000])
def test_norm_factor_round_trip(m):
    there = norm_factor(m, ErrorNorm.MAX_L2, ErrorNorm.FROBENIUS_L2)
    back = norm_factor(m, ErrorNorm.FROBENIUS_L2, ErrorNorm.MAX_L2)
    assert there * back == pytest.approx(1.0, rel=1e-15)


def test_norm_factor_degenerate_dimension():
    with pytest.raises(DegenerateDimensionError, match="degenerate dimension"):
        norm_factor(1, ErrorNorm.FROBENIUS_L2, ErrorNorm.MAX_L2)
