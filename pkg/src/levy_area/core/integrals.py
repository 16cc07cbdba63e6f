import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateEigenvalueError, DimensionMismatchError, LevyAreaValueError
from .gaussian_source import GaussianSource
from .levy_algorithms import SeriesKernelConfig, levy_area
from .selection import CostReport, SelectionQuery, cost, cutoff, optimal_algorithm
from .types import AlgorithmId, ErrorNorm, IteratedIntegrals, LevyArea, WienerIncrement

logger = logging.getLogger(__name__)

# a Q-Wiener tolerance shrinking by more than this factor gets a warning
TOLERANCE_WARNING_RATIO = 100.0


def default_eps(h: float) -> float:
    """Precision h^(3/2) required by strong order one schemes."""
    return float(h) ** 1.5


def assemble(w: WienerIncrement, a_std: LevyArea) -> IteratedIntegrals:
    """
    Combine the increment and a standardized Levy area into the Ito integrals.

    I(h) = 1/2 (W W.T - h I_m) + h A_std, so the diagonal is 1/2 (w_i^2 - h)
    and I + I.T = W W.T - h I_m regardless of A_std.

    Args:
        w (WienerIncrement): the increment W_h over the step h
        a_std (LevyArea): Levy area for h = 1 of W_h / sqrt(h)

    Returns:
        IteratedIntegrals: the m x m matrix I(h)
    """
    if a_std.dim != w.dim:
        raise DimensionMismatchError(f"Levy area of dimension {a_std.dim} does not match increment of dimension {w.dim}")
    h = w.step
    symmetric = 0.5 * (np.outer(w.values, w.values) - h * np.eye(w.dim))
    return IteratedIntegrals(symmetric + h * a_std.entries)


def _zero_area(m: int) -> LevyArea:
    return LevyArea(np.zeros((m, m)))


def iterated_integrals(
    w: WienerIncrement,
    p: int,
    alg: AlgorithmId,
    cfg: Optional[SeriesKernelConfig] = None,
    src: Optional[GaussianSource] = None,
    **inputs,
) -> IteratedIntegrals:
    """
    Ito integrals I(h) with `alg` at an explicitly chosen truncation parameter.

    A one-dimensional increment is returned exactly without drawing anything.
    """
    if w.dim == 1:
        return assemble(w, _zero_area(1))
    a_std = levy_area(alg, w.standardize(), p, cfg, src, **inputs)
    return assemble(w, a_std)


def simulation_plan(
    m: int,
    h: float,
    eps: Optional[float] = None,
    norm: ErrorNorm = ErrorNorm.MAX_L2,
    alg: Optional[AlgorithmId] = None,
) -> CostReport:
    """
    Algorithm, truncation parameter and draw count `simulate` uses.

    Args:
        m (int): dimension
        h (float): step size
        eps (float, optional): precision, defaults to h^(3/2)
        norm (ErrorNorm): norm of the precision
        alg (AlgorithmId, optional): fixed algorithm, chosen by cost when None

    Returns:
        CostReport: for m = 1 the exact formula is used and no draws are spent
    """
    query = SelectionQuery(m=m, h=h, eps=default_eps(h) if eps is None else eps, norm=norm)
    if m == 1:
        return CostReport(algorithm=alg or AlgorithmId.FOURIER, p=1, gaussians=0)
    if alg is None:
        return optimal_algorithm(query)
    p = cutoff(alg, query)
    return CostReport(algorithm=alg, p=p, gaussians=cost(alg, m, p))


def _simulate_area(
    w: WienerIncrement,
    eps: Optional[float],
    norm: ErrorNorm,
    alg: Optional[AlgorithmId],
    src: Optional[GaussianSource],
    cfg: Optional[SeriesKernelConfig],
) -> LevyArea:
    plan = simulation_plan(w.dim, w.step, eps, norm, alg)
    logger.debug("Simulating m=%d h=%g with %s p=%d (%d draws)", w.dim, w.step, plan.algorithm.value, plan.p, plan.gaussians)
    if w.dim == 1:
        return _zero_area(1)
    return levy_area(plan.algorithm, w.standardize(), plan.p, cfg, src)


def simulate(
    w: WienerIncrement,
    eps: Optional[float] = None,
    norm: ErrorNorm = ErrorNorm.MAX_L2,
    alg: Optional[AlgorithmId] = None,
    src: Optional[GaussianSource] = None,
    cfg: Optional[SeriesKernelConfig] = None,
) -> IteratedIntegrals:
    """
    Simulate I(h) for the increment w to precision eps.

    Args:
        w (WienerIncrement): the increment W_h
        eps (float, optional): precision, h^(3/2) when omitted
        norm (ErrorNorm): norm in which eps is measured
        alg (AlgorithmId, optional): algorithm; the cheapest one when None
        src (GaussianSource): source for the Levy area draws
        cfg (SeriesKernelConfig, optional): blocking of the series kernel

    Returns:
        IteratedIntegrals: I(h)
    """
    return assemble(w, _simulate_area(w, eps, norm, alg, src, cfg))


def simulate_levy_area(
    w: WienerIncrement,
    eps: Optional[float] = None,
    norm: ErrorNorm = ErrorNorm.MAX_L2,
    alg: Optional[AlgorithmId] = None,
    src: Optional[GaussianSource] = None,
    cfg: Optional[SeriesKernelConfig] = None,
) -> LevyArea:
    """Levy area A(h) = h A_std at the same algorithm and cut-off as `simulate`."""
    return _simulate_area(w, eps, norm, alg, src, cfg).scaled(w.step)


@dataclass(frozen=True)
class QWienerSpec:
    """
    Square roots sqrt(eta_i) of the eigenvalues of Q for the retained modes.

    Args:
        sqrt_eigenvalues (np.ndarray): positive vector of length m
    """

    sqrt_eigenvalues: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.sqrt_eigenvalues, dtype=np.float64)
        if values.ndim != 1 or values.size < 1:
            raise LevyAreaValueError(f"Need a non-empty vector of eigenvalue roots, got shape {values.shape}")
        if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            raise DegenerateEigenvalueError("Q-Wiener eigenvalues must be strictly positive and finite")
        object.__setattr__(self, "sqrt_eigenvalues", values)

    @classmethod
    def from_eigenvalues(cls, eigenvalues) -> "QWienerSpec":
        eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
        if np.any(eigenvalues <= 0.0):
            raise DegenerateEigenvalueError("Q-Wiener eigenvalues must be strictly positive")
        return cls(np.sqrt(eigenvalues))

    @property
    def dim(self) -> int:
        return self.sqrt_eigenvalues.size

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.sqrt_eigenvalues**2


def qwiener_tolerance(spec: QWienerSpec, eps: float, norm: ErrorNorm) -> float:
    """
    Internal precision for the unscaled integrals so that the scaled ones meet eps.

    Entry (i, j) of the scaled error is sqrt(eta_i eta_j) times the unscaled one.
    max,L2: eps / max eta. L2,F: eps / sqrt(sum_{i != j} eta_i eta_j / (m^2 - m)).
    """
    eta = spec.eigenvalues
    m = spec.dim
    if norm == ErrorNorm.MAX_L2:
        scale = float(np.max(eta))
    elif m == 1:
        scale = 1.0
    else:
        off_diagonal = float(np.sum(eta)) ** 2 - float(np.sum(eta * eta))
        scale = math.sqrt(off_diagonal) / math.sqrt(m * m - m)

    tolerance = eps / scale
    if scale > TOLERANCE_WARNING_RATIO:
        logger.warning("Q-Wiener precision tightened from %g to %g (factor %.3g)", eps, tolerance, scale)
    return tolerance


def qwiener_plan(
    spec: QWienerSpec,
    h: float,
    eps: Optional[float] = None,
    norm: ErrorNorm = ErrorNorm.FROBENIUS_L2,
    alg: Optional[AlgorithmId] = None,
) -> CostReport:
    """Plan of the unscaled integrals at the tightened Q-Wiener precision."""
    tolerance = qwiener_tolerance(spec, default_eps(h) if eps is None else eps, norm)
    return simulation_plan(spec.dim, h, tolerance, norm, alg)


def simulate_qwiener(
    qw: WienerIncrement,
    spec: QWienerSpec,
    eps: Optional[float] = None,
    norm: ErrorNorm = ErrorNorm.FROBENIUS_L2,
    src: Optional[GaussianSource] = None,
    alg: Optional[AlgorithmId] = None,
    cfg: Optional[SeriesKernelConfig] = None,
    plan: Optional[CostReport] = None,
) -> IteratedIntegrals:
    """
    Iterated integrals of a Q-Wiener projection, Q^(1/2) I(h) Q^(1/2).

    Args:
        qw (WienerIncrement): increment already scaled by sqrt(eta_i)
        spec (QWienerSpec): the eigenvalue roots sqrt(eta_i)
        eps (float, optional): precision, h^(3/2) when omitted
        norm (ErrorNorm): defaults to the L2,F norm
        plan (CostReport, optional): result of qwiener_plan, computed here when None
    """
    if spec.dim != qw.dim:
        raise DimensionMismatchError(f"{spec.dim} eigenvalues given for an increment of dimension {qw.dim}")
    sq = spec.sqrt_eigenvalues
    w = WienerIncrement(qw.values / sq, qw.step)
    if plan is None:
        plan = qwiener_plan(spec, qw.step, eps, norm, alg)

    integrals = iterated_integrals(w, plan.p, plan.algorithm, cfg, src)
    return IteratedIntegrals((sq[:, None] * integrals.entries) * sq[None, :])
