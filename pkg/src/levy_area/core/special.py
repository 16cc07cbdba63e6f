import math

import numpy as np
from scipy import special

from .errors import DegenerateDimensionError, LevyAreaValueError
from .types import ErrorNorm


def trigamma_tail(p: int) -> float:
    """
    Tail value psi_1(p + 1) = sum_{r > p} 1 / r^2 of the trigamma function.

    Args:
        p (int): number of retained modes, p >= 0

    Returns:
        float: psi_1(p + 1); pi^2 / 6 for p = 0
    """
    if p < 0:
        raise LevyAreaValueError(f"Truncation parameter must be non-negative, got {p}")
    return float(special.polygamma(1, p + 1))


def tail_sum(p: int, p_ref: int) -> float:
    """Finite tail sum_{r = p + 1}^{p_ref} 1 / r^2, zero when p >= p_ref."""
    if p >= p_ref:
        return 0.0
    # smallest terms first
    r = np.arange(p_ref, p, -1, dtype=np.float64)
    return float(np.sum(1.0 / (r * r)))


def norm_factor(m: int, source: ErrorNorm, target: ErrorNorm) -> float:
    """
    Factor converting an error bound in one norm into a bound in another.

    Holds for skew-symmetric error matrices with identically distributed
    off-diagonal entries: ||A||_{L2,F} = sqrt(m^2 - m) ||A||_{max,L2}.

    Args:
        m (int): dimension of the Wiener process
        source (ErrorNorm): norm the bound is given in
        target (ErrorNorm): norm the bound is wanted in
    """
    if m < 1:
        raise LevyAreaValueError(f"Dimension must be at least 1, got {m}")
    if source == target:
        return 1.0
    frobenius_per_max = math.sqrt(m * m - m)
    if target == ErrorNorm.FROBENIUS_L2:
        return frobenius_per_max
    if m == 1:
        raise DegenerateDimensionError("degenerate dimension: a 1 x 1 Levy area has no max,L2 bound")
    return 1.0 / frobenius_per_max
