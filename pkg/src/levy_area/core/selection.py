import logging
import math
from dataclasses import dataclass
from typing import Dict

from .errors import BudgetExhaustedError, LevyAreaValueError
from .special import norm_factor
from .types import AlgorithmId, ErrorNorm

logger = logging.getLogger(__name__)

# constants c of the max,L2 bounds c * h / sqrt(p) (series only) and
# c * sqrt(m) * h / p (with tail approximation)
BOUND_CONSTANTS: Dict[AlgorithmId, float] = {
    AlgorithmId.FOURIER: math.sqrt(3.0 / (2.0 * math.pi**2)),
    AlgorithmId.MILSTEIN: math.sqrt(1.0 / (2.0 * math.pi**2)),
    AlgorithmId.WIKTORSSON: math.sqrt(5.0 / (12.0 * math.pi**2)),
    AlgorithmId.MRONROE: math.sqrt(1.0 / (12.0 * math.pi**2)),
}

# equal cost: the algorithm listed first wins
TIE_BREAK_ORDER = (
    AlgorithmId.MRONROE,
    AlgorithmId.MILSTEIN,
    AlgorithmId.FOURIER,
    AlgorithmId.WIKTORSSON,
)


def _is_root_order(alg: AlgorithmId) -> bool:
    """True for the algorithms whose error decays like 1/sqrt(p)."""
    return alg in (AlgorithmId.FOURIER, AlgorithmId.MILSTEIN)


@dataclass(frozen=True)
class SelectionQuery:
    """
    Arguments of a cut-off or cost question.

    Args:
        m (int): dimension of the Wiener process
        h (float): step size
        eps (float): prescribed precision
        norm (ErrorNorm): norm the precision is measured in
    """

    m: int
    h: float
    eps: float
    norm: ErrorNorm = ErrorNorm.MAX_L2

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise LevyAreaValueError(f"Dimension must be a positive integer, got {self.m}")
        for name in ("h", "eps"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0.0:
                raise LevyAreaValueError(f"{name} must be positive and finite, got {value}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "m", int(self.m))

    @classmethod
    def with_default_eps(cls, m: int, h: float, norm: ErrorNorm = ErrorNorm.MAX_L2) -> "SelectionQuery":
        """Query at eps = h^(3/2), the precision a strong order one scheme needs."""
        return cls(m=m, h=h, eps=float(h) ** 1.5, norm=norm)


@dataclass(frozen=True)
class CostReport:
    algorithm: AlgorithmId
    p: int
    gaussians: int


def overhead(alg: AlgorithmId, m: int) -> int:
    """Draws an algorithm spends on top of the 2pm Fourier coefficients."""
    if alg == AlgorithmId.FOURIER:
        return 0
    if alg == AlgorithmId.MILSTEIN:
        return m
    if alg == AlgorithmId.WIKTORSSON:
        return (m * m - m) // 2
    return (m * m + m) // 2


def cost(alg: AlgorithmId, m: int, p: int) -> int:
    """Number of standard normal draws needed for one Levy area matrix."""
    if m < 1 or p < 1:
        raise LevyAreaValueError(f"Need m >= 1 and p >= 1, got m={m}, p={p}")
    return 2 * p * m + overhead(alg, m)


def _max_l2_bound(alg: AlgorithmId, m: int, h: float, p: float) -> float:
    if _is_root_order(alg):
        return BOUND_CONSTANTS[alg] * h / math.sqrt(p)
    return BOUND_CONSTANTS[alg] * math.sqrt(m) * h / p


def error_bound(alg: AlgorithmId, m: int, h: float, p: int, norm: ErrorNorm = ErrorNorm.MAX_L2) -> float:
    """
    Upper bound for the mean square error of `alg` with truncation parameter p.

    Args:
        alg (AlgorithmId): algorithm
        m (int): dimension
        h (float): step size
        p (int): truncation parameter
        norm (ErrorNorm): max,L2 or L2,F

    Returns:
        float: the bound; the L2,F bound is sqrt(m^2 - m) times the max,L2 bound
    """
    if int(p) != p or p < 1:
        raise LevyAreaValueError(f"Truncation parameter must be a positive integer, got {p}")
    bound = _max_l2_bound(alg, m, h, p)
    return bound * norm_factor(m, ErrorNorm.MAX_L2, norm)


def _raw_cutoff(alg: AlgorithmId, q: SelectionQuery) -> float:
    eps = q.eps / norm_factor(q.m, ErrorNorm.MAX_L2, q.norm)
    c = BOUND_CONSTANTS[alg]
    if _is_root_order(alg):
        return (c * q.h / eps) ** 2
    return c * math.sqrt(q.m) * q.h / eps


def cutoff(alg: AlgorithmId, q: SelectionQuery) -> int:
    """
    Smallest truncation parameter p whose error bound meets q.eps.

    p = max(1, ceil(formula)); the ceiling is checked against error_bound so
    that rounding in the formula never returns p one too small or too large.
    A query with m = 1 returns p = 1, there is no Levy area to approximate.
    """
    if q.m == 1:
        return 1

    raw = _raw_cutoff(alg, q)
    if not math.isfinite(raw) or raw > 2**62:
        raise LevyAreaValueError(f"Precision {q.eps} is out of reach for {alg.value} (p ~ {raw:.3g})")
    p = max(1, math.ceil(raw))

    while error_bound(alg, q.m, q.h, p, q.norm) > q.eps:
        p += 1
    while p > 1 and error_bound(alg, q.m, q.h, p - 1, q.norm) <= q.eps:
        p -= 1
    return p


def smooth_cost(alg: AlgorithmId, q: SelectionQuery) -> float:
    """Real-valued cost 2 m p + overhead with the un-rounded cut-off."""
    if q.m == 1:
        return 0.0
    return 2.0 * q.m * _raw_cutoff(alg, q) + overhead(alg, q.m)


def achievable_error(
    alg: AlgorithmId,
    m: int,
    h: float,
    budget: int,
    norm: ErrorNorm = ErrorNorm.MAX_L2,
) -> float:
    """
    Smallest error bound reachable with `budget` standard normal draws.

    The budget left after the fixed overhead buys p = (budget - overhead) / 2m
    modes, taken as a real number.

    Raises:
        BudgetExhaustedError: the budget does not exceed the overhead
    """
    if budget != int(budget) or budget < 1:
        raise LevyAreaValueError(f"Budget must be a positive integer, got {budget}")
    fixed = overhead(alg, m)
    if budget <= fixed:
        raise BudgetExhaustedError(
            f"budget exhausted by overhead: {alg.value} needs more than {fixed} draws for m={m}, got {budget}"
        )
    p = (budget - fixed) / (2.0 * m)
    return _max_l2_bound(alg, m, h, p) * norm_factor(m, ErrorNorm.MAX_L2, norm)


def optimal_algorithm(q: SelectionQuery) -> CostReport:
    """
    Algorithm with the fewest standard normal draws for the query.

    Every algorithm is evaluated at its own cut-off with the exact integer
    cost; equal costs are resolved by TIE_BREAK_ORDER. Algorithms whose
    cut-off is out of reach are left out.

    Raises:
        LevyAreaValueError: no algorithm reaches the precision
    """
    if q.m == 1:
        return CostReport(algorithm=AlgorithmId.FOURIER, p=1, gaussians=0)

    reports = []
    for alg in TIE_BREAK_ORDER:
        try:
            p = cutoff(alg, q)
        except LevyAreaValueError as e:
            logger.debug("Skipping %s for %s: %s", alg.value, q, e)
            continue
        reports.append(CostReport(algorithm=alg, p=p, gaussians=cost(alg, q.m, p)))
        logger.debug("Cost of %s for %s: p=%d draws=%d", alg.value, q, p, reports[-1].gaussians)

    if not reports:
        raise LevyAreaValueError(f"Precision {q.eps} is out of reach for every algorithm (m={q.m}, h={q.h})")

    # min keeps the first of equal elements
    return min(reports, key=lambda report: report.gaussians)
