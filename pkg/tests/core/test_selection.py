import math

import numpy as np
import pytest

from levy_area.core.errors import BudgetExhaustedError, LevyAreaValueError
from levy_area.core.selection import (
    CostReport,
    SelectionQuery,
    achievable_error,
    cost,
    cutoff,
    error_bound,
    optimal_algorithm,
    overhead,
    smooth_cost,
)
from levy_area.core.special import norm_factor
from levy_area.core.types import AlgorithmId, ErrorNorm

ALGORITHMS = list(AlgorithmId)
STEPSIZES = [10.0**-k for k in range(9)]


def test_wiktorsson_cutoff_for_fifty_dimensions():
    q = SelectionQuery(m=50, h=0.01, eps=0.001)
    assert cutoff(AlgorithmId.WIKTORSSON, q) == 15
    assert cutoff(AlgorithmId.MRONROE, q) == 7


def test_fourier_cutoff_floor():
    for m in (2, 7, 300):
        assert cutoff(AlgorithmId.FOURIER, SelectionQuery(m=m, h=1.0, eps=1.0)) == 1


def test_one_dimension_needs_no_modes():
    for norm in ErrorNorm:
        q = SelectionQuery(m=1, h=0.5, eps=1e-6, norm=norm)
        assert all(cutoff(alg, q) == 1 for alg in ALGORITHMS)
    report = optimal_algorithm(SelectionQuery(m=1, h=0.5, eps=1e-6))
    assert (report.algorithm, report.p, report.gaussians) == (AlgorithmId.FOURIER, 1, 0)


@pytest.mark.parametrize(
    "alg, expected",
    [(AlgorithmId.FOURIER, 100), (AlgorithmId.MILSTEIN, 105), (AlgorithmId.WIKTORSSON, 110), (AlgorithmId.MRONROE, 115)],
)
def test_cost_table(alg, expected):
    assert cost(alg, 5, 10) == expected


def test_overheads():
    assert [overhead(alg, 4) for alg in ALGORITHMS] == [0, 4, 6, 10]


def test_cost_rejects_bad_arguments():
    with pytest.raises(LevyAreaValueError):
        cost(AlgorithmId.FOURIER, 0, 1)
    with pytest.raises(LevyAreaValueError):
        cost(AlgorithmId.FOURIER, 2, 0)


def test_achievable_error():
    value = achievable_error(AlgorithmId.FOURIER, 3, 1.0, 12, ErrorNorm.MAX_L2)
    assert value == pytest.approx(3.0 / (math.pi * math.sqrt(12.0)), rel=1e-12)
    assert value == pytest.approx(0.27566, abs=1e-5)


@pytest.mark.parametrize("alg, m, budget", [(AlgorithmId.MILSTEIN, 5, 5), (AlgorithmId.MRONROE, 2, 3), (AlgorithmId.WIKTORSSON, 4, 6)])
def test_achievable_error_budget_exhausted(alg, m, budget):
    with pytest.raises(BudgetExhaustedError, match="budget exhausted"):
        achievable_error(alg, m, 1.0, budget)


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_achievable_error_inverts_the_bound(alg):
    # at a budget spent exactly on p modes, the reachable error is the bound at p
    m, h, p = 6, 0.1, 40
    budget = cost(alg, m, p)
    for norm in ErrorNorm:
        assert achievable_error(alg, m, h, budget, norm) == pytest.approx(error_bound(alg, m, h, p, norm), rel=1e-12)


def test_error_bounds():
    assert error_bound(AlgorithmId.MILSTEIN, 2, 1.0, 10) == pytest.approx(0.07118, abs=1e-5)
    assert error_bound(AlgorithmId.WIKTORSSON, 2, 1.0, 10) == pytest.approx(0.02906, abs=1e-5)
    assert error_bound(AlgorithmId.MRONROE, 2, 1.0, 10) == pytest.approx(0.01299, abs=1e-5)
    assert error_bound(AlgorithmId.MRONROE, 5, 1.0, 10) == pytest.approx(0.02055, abs=1e-5)
    frobenius = error_bound(AlgorithmId.FOURIER, 4, 0.5, 9, ErrorNorm.FROBENIUS_L2)
    assert frobenius == pytest.approx(math.sqrt(12.0) * error_bound(AlgorithmId.FOURIER, 4, 0.5, 9), rel=1e-15)


def random_queries(count: int):
    rng = np.random.default_rng(2024)
    for _ in range(count):
        m = int(rng.integers(2, 400))
        h = 10.0 ** rng.uniform(-6, 0)
        eps = h ** rng.uniform(1.0, 1.5)
        norm = ErrorNorm.MAX_L2 if rng.random() < 0.5 else ErrorNorm.FROBENIUS_L2
        yield SelectionQuery(m=m, h=h, eps=eps, norm=norm)


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_cutoff_is_the_smallest_sufficient_p(alg):
    for q in random_queries(200):
        p = cutoff(alg, q)
        assert error_bound(alg, q.m, q.h, p, q.norm) <= q.eps
        if p >= 2:
            assert error_bound(alg, q.m, q.h, p - 1, q.norm) > q.eps


def test_mronroe_never_needs_more_modes_than_wiktorsson():
    for q in random_queries(200):
        assert cutoff(AlgorithmId.MRONROE, q) <= cutoff(AlgorithmId.WIKTORSSON, q)
        ratio = (smooth_cost(AlgorithmId.MRONROE, q) - overhead(AlgorithmId.MRONROE, q.m)) / (
            smooth_cost(AlgorithmId.WIKTORSSON, q) - overhead(AlgorithmId.WIKTORSSON, q.m)
        )
        assert ratio == pytest.approx(1.0 / math.sqrt(5.0), rel=1e-12)


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_frobenius_cutoff_is_a_rescaled_max_cutoff(alg):
    for q in random_queries(100):
        frobenius = SelectionQuery(m=q.m, h=q.h, eps=q.eps, norm=ErrorNorm.FROBENIUS_L2)
        factor = norm_factor(q.m, ErrorNorm.MAX_L2, ErrorNorm.FROBENIUS_L2)
        rescaled = SelectionQuery(m=q.m, h=q.h, eps=q.eps / factor, norm=ErrorNorm.MAX_L2)
        # the max,L2 cut-off at eps / factor, searched with the bound scaled back by factor
        p = cutoff(alg, rescaled)
        while error_bound(alg, q.m, q.h, p, ErrorNorm.MAX_L2) * factor > q.eps:
            p += 1
        while p > 1 and error_bound(alg, q.m, q.h, p - 1, ErrorNorm.MAX_L2) * factor <= q.eps:
            p -= 1
        assert cutoff(alg, frobenius) == p


def test_optimal_is_the_argmin():
    for q in random_queries(300):
        report = optimal_algorithm(q)
        assert report.gaussians == cost(report.algorithm, q.m, report.p)
        assert report.p == cutoff(report.algorithm, q)
        for alg in ALGORITHMS:
            assert report.gaussians <= cost(alg, q.m, cutoff(alg, q))


def test_mronroe_for_small_steps():
    q = SelectionQuery.with_default_eps(10, 1e-6)
    assert q.eps == pytest.approx(1e-9)
    report = optimal_algorithm(q)
    assert report.algorithm == AlgorithmId.MRONROE
    assert report.gaussians < cost(AlgorithmId.MILSTEIN, 10, cutoff(AlgorithmId.MILSTEIN, q)) / 100


def test_unreachable_algorithms_are_skipped():
    q = SelectionQuery.with_default_eps(10, 1e-20)
    with pytest.raises(LevyAreaValueError, match="out of reach"):
        cutoff(AlgorithmId.MILSTEIN, q)
    report = optimal_algorithm(q)
    assert report.algorithm == AlgorithmId.MRONROE
    assert report.p == cutoff(AlgorithmId.MRONROE, q)
    assert report.gaussians == cost(AlgorithmId.MRONROE, 10, report.p)


def test_no_reachable_algorithm():
    q = SelectionQuery(m=2, h=1.0, eps=1e-25)
    with pytest.raises(LevyAreaValueError, match="every algorithm"):
        optimal_algorithm(q)


def test_milstein_for_high_dimension_and_large_steps():
    report = optimal_algorithm(SelectionQuery.with_default_eps(1000, 0.1))
    assert report.algorithm == AlgorithmId.MILSTEIN
    assert report.p == 1
    assert report.gaussians == 3000


def test_large_tolerance_uses_a_single_mode():
    q = SelectionQuery(m=2, h=1.0, eps=10.0)
    assert all(cutoff(alg, q) == 1 for alg in ALGORITHMS)
    assert optimal_algorithm(q) == CostReport(AlgorithmId.FOURIER, 1, 4)


def test_equal_cost_prefers_mronroe_over_milstein():
    # m = 5, h / eps = 7: Milstein p = 3 and Mrongowius-Roessler p = 2 both cost 35 draws
    q = SelectionQuery(m=5, h=1.0, eps=1.0 / 7.0)
    assert cutoff(AlgorithmId.MILSTEIN, q) == 3
    assert cutoff(AlgorithmId.MRONROE, q) == 2
    assert cost(AlgorithmId.MILSTEIN, 5, 3) == cost(AlgorithmId.MRONROE, 5, 2) == 35
    assert optimal_algorithm(q) == CostReport(AlgorithmId.MRONROE, 2, 35)


def wiktorsson_pocket(m: int, h: float) -> bool:
    return m == 2 and 0.0844 < h < 0.152


def test_wiktorsson_is_never_the_cheapest_outside_the_two_dimensional_pocket():
    dims = sorted(set(np.unique(np.logspace(np.log10(2), 3, 60).astype(int)).tolist()) | {2, 3, 10, 100, 1000})
    for m in dims:
        for h in STEPSIZES:
            if wiktorsson_pocket(m, h):
                continue
            report = optimal_algorithm(SelectionQuery.with_default_eps(m, h))
            assert report.algorithm != AlgorithmId.WIKTORSSON, (m, h)


def test_wiktorsson_pocket_in_two_dimensions():
    report = optimal_algorithm(SelectionQuery.with_default_eps(2, 0.1))
    assert (report.algorithm, report.p, report.gaussians) == (AlgorithmId.WIKTORSSON, 1, 5)
    for h in (0.07, 0.2):
        assert optimal_algorithm(SelectionQuery.with_default_eps(2, h)).algorithm != AlgorithmId.WIKTORSSON


def test_query_validation():
    with pytest.raises(LevyAreaValueError):
        SelectionQuery(m=0, h=1.0, eps=1.0)
    with pytest.raises(LevyAreaValueError):
        SelectionQuery(m=2, h=-1.0, eps=1.0)
    with pytest.raises(LevyAreaValueError):
        SelectionQuery(m=2, h=1.0, eps=0.0)
