import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, NamedTuple, Optional

import numpy as np

from .errors import DimensionMismatchError, LevyAreaValueError, ResourceLimitError
from .gaussian_source import GaussianSource, draw_matrix, draw_strict_lower, draw_vector
from .special import trigamma_tail
from .types import AlgorithmId, LevyArea, StandardizedIncrement

logger = logging.getLogger(__name__)

# scalar values of scratch space for the alpha and beta blocks
DEFAULT_MEMORY_CAP = 2**26


@dataclass(frozen=True)
class SeriesKernelConfig:
    """
    Blocking of the truncated series S = sum_k alpha^(k) beta_tilde^(k).T.

    Args:
        block_size (int, optional): columns n per partial product. Defaults to
            the largest block that fits into memory_cap, at most p.
        memory_cap (int): maximum number of scratch values (2 m n) held at once
    """

    block_size: Optional[int] = None
    memory_cap: int = DEFAULT_MEMORY_CAP

    def __post_init__(self):
        if self.block_size is not None and self.block_size < 1:
            raise LevyAreaValueError(f"Block size must be positive, got {self.block_size}")
        if self.memory_cap < 1:
            raise LevyAreaValueError(f"Memory cap must be positive, got {self.memory_cap}")

    def effective_block_size(self, m: int, p: int) -> int:
        fitting = self.memory_cap // (2 * m)
        if fitting < 1:
            raise ResourceLimitError(
                f"A single column pair needs {2 * m} scratch values, memory cap is {self.memory_cap}"
            )
        requested = p if self.block_size is None else self.block_size
        return max(1, min(requested, fitting, p))


@dataclass(frozen=True)
class FourierCoefficients:
    """
    Standardized Fourier coefficients alpha_r, beta_r (columns r = 1..p).

    Passing these to an algorithm replaces the draws of the series part.
    """

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=np.float64)
        beta = np.asarray(self.beta, dtype=np.float64)
        if alpha.ndim != 2 or alpha.shape != beta.shape:
            raise DimensionMismatchError(
                f"alpha and beta must be matrices of equal shape, got {alpha.shape} and {beta.shape}"
            )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def p(self) -> int:
        return self.alpha.shape[1]


class CoefficientBlocks(NamedTuple):
    alpha: np.ndarray
    # columns (beta_r - sqrt(2) W) / r
    beta_tilde: np.ndarray


def _increment_vector(w_std) -> np.ndarray:
    if isinstance(w_std, StandardizedIncrement):
        return w_std.values
    return StandardizedIncrement(w_std).values


def _check_truncation(p: int):
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)) or p < 1:
        raise LevyAreaValueError(f"Truncation parameter must be a positive integer, got {p}")


def _coefficient_blocks(
    w: np.ndarray,
    start: int,
    stop: int,
    src: Optional[GaussianSource],
    coefficients: Optional[FourierCoefficients],
) -> CoefficientBlocks:
    m = w.size
    if coefficients is not None:
        alpha = coefficients.alpha[:, start:stop]
        beta = coefficients.beta[:, start:stop]
    else:
        alpha = draw_matrix(src, m, stop - start)
        beta = draw_matrix(src, m, stop - start)
    r = np.arange(start + 1, stop + 1, dtype=np.float64)
    beta_tilde = (beta - math.sqrt(2.0) * w[:, None]) / r
    return CoefficientBlocks(alpha=alpha, beta_tilde=beta_tilde)


def truncated_series_s(
    w_std,
    p: int,
    cfg: Optional[SeriesKernelConfig] = None,
    src: Optional[GaussianSource] = None,
    coefficients: Optional[FourierCoefficients] = None,
) -> np.ndarray:
    """
    Truncated series S = sum_{r=1}^{p} 1/r alpha_r (beta_r - sqrt(2) W).T for h = 1.

    The sum is evaluated as ceil(p/n) dense products alpha^(k) beta_tilde^(k).T
    over column blocks of width n. Draw order per block: alpha, then beta.

    Args:
        w_std (StandardizedIncrement): the increment W_h / sqrt(h)
        p (int): truncation parameter, p >= 1
        cfg (SeriesKernelConfig, optional): blocking and memory cap
        src (GaussianSource, optional): source for alpha and beta, 2pm draws
        coefficients (FourierCoefficients, optional): injected alpha and beta,
            nothing is drawn when given

    Returns:
        np.ndarray: m x m matrix S
    """
    w = _increment_vector(w_std)
    _check_truncation(p)
    m = w.size
    cfg = cfg or SeriesKernelConfig()

    if coefficients is not None:
        if coefficients.alpha.shape[0] != m or coefficients.p < p:
            raise DimensionMismatchError(
                f"Need coefficients of shape ({m}, >={p}), got {coefficients.alpha.shape}"
            )
    elif src is None:
        raise LevyAreaValueError("Either a GaussianSource or injected coefficients are required")

    n = cfg.effective_block_size(m, p)
    logger.debug("Series kernel m=%d p=%d block_size=%d blocks=%d", m, p, n, -(-p // n))

    s = np.zeros((m, m))
    for start in range(0, p, n):
        blocks = _coefficient_blocks(w, start, min(start + n, p), src, coefficients)
        s += blocks.alpha @ blocks.beta_tilde.T
    return s


def _skew_part(s: np.ndarray) -> LevyArea:
    return LevyArea((s - s.T) / (2.0 * math.pi))


def _tail_scale(p: int) -> float:
    return math.sqrt(2.0 * trigamma_tail(p))


def _gamma_1(src, m: int, gamma_1) -> np.ndarray:
    if gamma_1 is None:
        return draw_vector(src, m)
    gamma_1 = np.asarray(gamma_1, dtype=np.float64)
    if gamma_1.shape != (m,):
        raise DimensionMismatchError(f"gamma_1 must have shape ({m},), got {gamma_1.shape}")
    return gamma_1


def _gamma_lower(src, m: int, gamma_lower) -> np.ndarray:
    if gamma_lower is None:
        return draw_strict_lower(src, m)
    gamma_lower = np.asarray(gamma_lower, dtype=np.float64)
    if gamma_lower.shape != (m, m):
        raise DimensionMismatchError(f"Gamma must have shape ({m}, {m}), got {gamma_lower.shape}")
    if np.any(np.triu(gamma_lower) != 0.0):
        raise LevyAreaValueError("Gamma must be strictly lower triangular")
    return gamma_lower


def fourier_levy_area(
    w_std,
    p: int,
    cfg: Optional[SeriesKernelConfig] = None,
    src: Optional[GaussianSource] = None,
    *,
    coefficients: Optional[FourierCoefficients] = None,
) -> LevyArea:
    """
    Levy area A(1) from the truncated Fourier series, no tail approximation.

    Draws 2pm standard normals.
    """
    s = truncated_series_s(w_std, p, cfg, src, coefficients)
    return _skew_part(s)


def milstein_levy_area(
    w_std,
    p: int,
    cfg: Optional[SeriesKernelConfig] = None,
    src: Optional[GaussianSource] = None,
    *,
    coefficients: Optional[FourierCoefficients] = None,
    gamma_1=None,
) -> LevyArea:
    """
    Levy area A(1) with the exact simulation of the a_0 rest term.

    S = S_FS + sqrt(2 psi_1(p+1)) W gamma_1.T; draws 2pm + m standard normals.

    Args:
        gamma_1 (np.ndarray, optional): injected N(0, I_m) vector
    """
    w = _increment_vector(w_std)
    s = truncated_series_s(w, p, cfg, src, coefficients)
    gamma_1 = _gamma_1(src, w.size, gamma_1)
    s += _tail_scale(p) * np.outer(w, gamma_1)
    return _skew_part(s)


def wiktorsson_levy_area(
    w_std,
    p: int,
    cfg: Optional[SeriesKernelConfig] = None,
    src: Optional[GaussianSource] = None,
    *,
    coefficients: Optional[FourierCoefficients] = None,
    gamma_lower=None,
) -> LevyArea:
    """
    Levy area A(1) with Wiktorsson's Gaussian approximation of the whole tail.

    S = S_FS + c (G - G.T) W W.T / (1 + sqrt(1 + |W|^2)) + c G with
    c = sqrt(2 psi_1(p+1)) and G strictly lower triangular.
    Draws 2pm + m(m-1)/2 standard normals.

    Args:
        gamma_lower (np.ndarray, optional): injected strictly lower triangular G
    """
    w = _increment_vector(w_std)
    s = truncated_series_s(w, p, cfg, src, coefficients)
    gamma = _tail_scale(p) * _gamma_lower(src, w.size, gamma_lower)

    radical = 1.0 + math.sqrt(1.0 + float(w @ w))
    s += np.outer((gamma - gamma.T) @ w, w) / radical + gamma
    return _skew_part(s)


def mronroe_levy_area(
    w_std,
    p: int,
    cfg: Optional[SeriesKernelConfig] = None,
    src: Optional[GaussianSource] = None,
    *,
    coefficients: Optional[FourierCoefficients] = None,
    gamma_1=None,
    gamma_lower=None,
) -> LevyArea:
    """
    Levy area A(1) by Mrongowius and Roessler.

    The a_0 rest term is simulated exactly and the remaining tail is replaced
    by an independent Gaussian matrix: S = S_FS + c (W gamma_1.T + G_2).
    Draws 2pm + m(m-1)/2 + m standard normals.
    """
    w = _increment_vector(w_std)
    s = truncated_series_s(w, p, cfg, src, coefficients)
    gamma_1 = _gamma_1(src, w.size, gamma_1)
    gamma_2 = _gamma_lower(src, w.size, gamma_lower)
    s += _tail_scale(p) * (np.outer(w, gamma_1) + gamma_2)
    return _skew_part(s)


LEVY_AREA_ALGORITHMS: Dict[AlgorithmId, Callable[..., LevyArea]] = {
    AlgorithmId.FOURIER: fourier_levy_area,
    AlgorithmId.MILSTEIN: milstein_levy_area,
    AlgorithmId.WIKTORSSON: wiktorsson_levy_area,
    AlgorithmId.MRONROE: mronroe_levy_area,
}


def levy_area(
    alg: AlgorithmId,
    w_std,
    p: int,
    cfg: Optional[SeriesKernelConfig] = None,
    src: Optional[GaussianSource] = None,
    **inputs,
) -> LevyArea:
    """Run the Levy area algorithm `alg`; keyword inputs are passed through as injected draws."""
    func = LEVY_AREA_ALGORITHMS[alg]
    return func(w_std, p, cfg, src, **inputs)
