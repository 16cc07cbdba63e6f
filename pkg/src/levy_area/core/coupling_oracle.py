import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence

import numpy as np
from scipy import linalg

from .errors import (
    EmptyTailError,
    LevyAreaValueError,
    ResourceLimitError,
    SingularCovarianceError,
)
from .gaussian_source import GaussianSource, draw_matrix, draw_vector, entropy_seed, strict_lower_indices
from .integrals import assemble
from .levy_algorithms import FourierCoefficients, SeriesKernelConfig, levy_area
from .selection import cost, error_bound
from .special import tail_sum, trigamma_tail
from .types import AlgorithmId, ErrorNorm, IteratedIntegrals, LevyArea, StandardizedIncrement, WienerIncrement

logger = logging.getLogger(__name__)

# K_m and P_m take m^2 x m^2 dense storage
MAX_DENSE_DIM = 16
# eigenvalues below DEFAULT_CLAMP * largest eigenvalue are raised to that level
DEFAULT_CLAMP = 1e-12
# more negative than this (relative) and the covariance is not a covariance
_INDEFINITE_TOLERANCE = 1e-8
DEFAULT_P_REF = 10**6


@dataclass(frozen=True)
class StoredPath:
    """
    One realization of W_std and its first p_ref standardized Fourier coefficients (h = 1).

    Coefficients beyond p_ref are zero for the reference realization.
    """

    w_std: StandardizedIncrement
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=np.float64)
        beta = np.asarray(self.beta, dtype=np.float64)
        m = self.w_std.dim
        if alpha.ndim != 2 or alpha.shape != beta.shape or alpha.shape[0] != m or alpha.shape[1] < 1:
            raise LevyAreaValueError(
                f"Stored coefficients must both be {m} x p_ref with p_ref >= 1, got {alpha.shape} and {beta.shape}"
            )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def m(self) -> int:
        return self.w_std.dim

    @property
    def p_ref(self) -> int:
        return self.alpha.shape[1]

    @classmethod
    def simulate(cls, m: int, p_ref: int, src: GaussianSource) -> "StoredPath":
        """Draw W_std (m values), then alpha and beta (m x p_ref each)."""
        if p_ref < 1:
            raise LevyAreaValueError(f"p_ref must be positive, got {p_ref}")
        w_std = StandardizedIncrement(draw_vector(src, m))
        alpha = draw_matrix(src, m, p_ref)
        beta = draw_matrix(src, m, p_ref)
        return cls(w_std=w_std, alpha=alpha, beta=beta)

    def coefficients(self, p: int) -> FourierCoefficients:
        """The first p stored columns."""
        return FourierCoefficients(self.alpha[:, :p], self.beta[:, :p])


@dataclass(frozen=True)
class VecOps:
    """
    Column-stacking vec operator with the selection matrix K_m and permutation P_m.

    K_m (M x m^2) picks the M = m(m-1)/2 entries below the diagonal in
    column-major order, P_m (m^2 x m^2) maps vec(A) to vec(A.T).
    """

    m: int
    selection: np.ndarray
    permutation: np.ndarray

    @property
    def size(self) -> int:
        """M, the number of entries below the diagonal."""
        return self.selection.shape[0]

    def vec(self, a: np.ndarray) -> np.ndarray:
        return np.asarray(a).reshape(-1, order="F")

    def mat(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v).reshape((self.m, self.m), order="F")

    def lower(self, a: np.ndarray) -> np.ndarray:
        """K_m vec(a)"""
        return self.selection @ self.vec(a)

    def lower_matrix(self, gamma: np.ndarray) -> np.ndarray:
        """mat(K_m.T gamma), the strictly lower triangular matrix holding gamma."""
        return self.mat(self.selection.T @ gamma)

    def skew_from_lower(self, gamma: np.ndarray) -> np.ndarray:
        """mat((I - P_m) K_m.T gamma), the skew matrix with lower entries gamma."""
        full = self.selection.T @ gamma
        return self.mat(full - self.permutation @ full)

    def skew_projector(self) -> np.ndarray:
        """K_m (I - P_m), shape M x m^2."""
        return self.selection - self.selection @ self.permutation


def make_vec_ops(m: int) -> VecOps:
    if m < 1:
        raise LevyAreaValueError(f"Dimension must be at least 1, got {m}")
    if m > MAX_DENSE_DIM:
        raise ResourceLimitError(f"Dense K_m and P_m are limited to m <= {MAX_DENSE_DIM}, got m={m}")

    size = m * (m - 1) // 2
    rows, cols = strict_lower_indices(m)
    selection = np.zeros((size, m * m), dtype=np.int64)
    selection[np.arange(size), cols * m + rows] = 1

    i = np.arange(m * m)
    permutation = np.zeros((m * m, m * m), dtype=np.int64)
    permutation[i, m * (i % m) + i // m] = 1
    return VecOps(m=m, selection=selection, permutation=permutation)


def _covariance_sandwich(ops: VecOps, kron: np.ndarray) -> np.ndarray:
    projector = ops.skew_projector()
    return projector @ kron @ projector.T


def sigma_inf(w_std, ops: Optional[VecOps] = None) -> np.ndarray:
    """Asymptotic tail covariance I_M + K(I - P)(W W.T kron I_m)(I - P)K.T for h = 1."""
    w = w_std.values if isinstance(w_std, StandardizedIncrement) else np.asarray(w_std, dtype=np.float64)
    ops = ops or make_vec_ops(w.size)
    kron = np.kron(np.outer(w, w), np.eye(ops.m))
    return np.eye(ops.size) + _covariance_sandwich(ops, kron)


def sqrt_sigma_inf(w_std, ops: Optional[VecOps] = None) -> np.ndarray:
    """Closed-form square root (Sigma_inf + rho I_M) / (1 + rho), rho = sqrt(1 + |W|^2)."""
    w = w_std.values if isinstance(w_std, StandardizedIncrement) else np.asarray(w_std, dtype=np.float64)
    ops = ops or make_vec_ops(w.size)
    rho = math.sqrt(1.0 + float(w @ w))
    return (sigma_inf(w, ops) + rho * np.eye(ops.size)) / (1.0 + rho)


@dataclass(frozen=True)
class TailCovariance:
    """Conditional covariance of a whitened tail vector, M x M."""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise LevyAreaValueError(f"Covariance must be square, got shape {matrix.shape}")
        object.__setattr__(self, "matrix", 0.5 * (matrix + matrix.T))

    def inverse_sqrt(self, clamp: float = DEFAULT_CLAMP) -> np.ndarray:
        """
        Symmetric inverse square root through an eigendecomposition.

        Eigenvalues below clamp * (largest eigenvalue) are raised to that value.

        Raises:
            SingularCovarianceError: no positive eigenvalue, or a clearly
                negative one
        """
        if self.matrix.size == 0:
            return self.matrix.copy()
        eigenvalues, eigenvectors = linalg.eigh(self.matrix)
        largest = eigenvalues[-1]
        if not largest > 0.0:
            raise SingularCovarianceError("Tail covariance has no positive eigenvalue")
        if eigenvalues[0] < -_INDEFINITE_TOLERANCE * largest:
            raise SingularCovarianceError(f"Tail covariance is indefinite (eigenvalue {eigenvalues[0]:.3g})")

        floor = clamp * largest
        if eigenvalues[0] < floor:
            logger.warning(
                "Clamping %d tail covariance eigenvalue(s) below %.3g",
                int(np.sum(eigenvalues < floor)),
                floor,
            )
            eigenvalues = np.maximum(eigenvalues, floor)
        return (eigenvectors / np.sqrt(eigenvalues)) @ eigenvectors.T


class TailSums(NamedTuple):
    # sum_{r>p} 1/r^2
    weight: float
    # sum_{r>p} alpha_r / r
    alpha: np.ndarray
    # sum_{r>p} 1/r alpha_r (beta_r - sqrt(2) W).T
    full: np.ndarray
    # sum_{r>p} 1/r alpha_r beta_r.T
    partial: np.ndarray
    # sum_{r>p} 1/r^2 b_r b_r.T with b_r = beta_r - sqrt(2) W
    beta_gram: np.ndarray
    # sum_{r>p} 1/r^2 alpha_r alpha_r.T
    alpha_gram: np.ndarray


def _check_tail(path: StoredPath, p: int):
    if p < 1:
        raise LevyAreaValueError(f"Truncation parameter must be positive, got {p}")
    if p >= path.p_ref:
        raise EmptyTailError(f"No stored tail beyond p={p} with p_ref={path.p_ref}")


def tail_sums(path: StoredPath, p: int) -> TailSums:
    _check_tail(path, p)
    r = np.arange(p + 1, path.p_ref + 1, dtype=np.float64)
    alpha = path.alpha[:, p:] / r
    beta = path.beta[:, p:] / r
    shifted = beta - math.sqrt(2.0) * path.w_std.values[:, None] / r

    return TailSums(
        weight=tail_sum(p, path.p_ref),
        alpha=np.sum(alpha, axis=1),
        full=path.alpha[:, p:] @ shifted.T,
        partial=path.alpha[:, p:] @ beta.T,
        beta_gram=shifted @ shifted.T,
        alpha_gram=alpha @ alpha.T,
    )


def _tail_covariances(sums: TailSums, ops: VecOps):
    eye = np.eye(ops.m)
    sigma = 0.5 * _covariance_sandwich(ops, np.kron(sums.beta_gram / sums.weight, eye))
    sigma_2 = 0.5 * _covariance_sandwich(ops, np.kron(eye, sums.alpha_gram / sums.weight))
    return TailCovariance(sigma), TailCovariance(sigma_2)


def tail_covariances(path: StoredPath, p: int, ops: Optional[VecOps] = None):
    """
    Finite-tail covariances (Sigma^(p), Sigma_2^(p)) of the stored path.

    The sums over r = p+1..p_ref are normalized by sum_{r=p+1}^{p_ref} 1/r^2
    instead of psi_1(p+1), which whitens the finite tail exactly.

    Returns:
        tuple[TailCovariance, TailCovariance]: both M x M
    """
    ops = ops or make_vec_ops(path.m)
    return _tail_covariances(tail_sums(path, p), ops)


class ExtractedGammas(NamedTuple):
    gamma_1: np.ndarray
    gamma: np.ndarray
    gamma_2: np.ndarray


def _whitened(ops: VecOps, covariance: TailCovariance, tail: np.ndarray, weight: float, clamp: float) -> np.ndarray:
    v = ops.lower(tail - tail.T)
    return covariance.inverse_sqrt(clamp) @ v / math.sqrt(2.0 * weight)


def _gamma_1(sums: TailSums) -> np.ndarray:
    return sums.alpha / math.sqrt(sums.weight)


def extract_gammas(
    path: StoredPath,
    p: int,
    ops: Optional[VecOps] = None,
    clamp: float = DEFAULT_CLAMP,
) -> ExtractedGammas:
    """
    Standard normal inputs of the tail approximations, taken from the stored tail.

    gamma_1 whitens sum alpha_r / r, gamma and gamma_2 whiten the lower
    triangles of the tails X - X.T (with beta_r - sqrt(2) W) and X_2 - X_2.T
    (with beta_r) by the inverse square roots of Sigma^(p) and Sigma_2^(p).
    """
    ops = ops or make_vec_ops(path.m)
    sums = tail_sums(path, p)
    sigma, sigma_2 = _tail_covariances(sums, ops)
    return ExtractedGammas(
        gamma_1=_gamma_1(sums),
        gamma=_whitened(ops, sigma, sums.full, sums.weight, clamp),
        gamma_2=_whitened(ops, sigma_2, sums.partial, sums.weight, clamp),
    )


def reference_levy_area(path: StoredPath, cfg: Optional[SeriesKernelConfig] = None) -> LevyArea:
    return levy_area(AlgorithmId.FOURIER, path.w_std, path.p_ref, cfg, coefficients=path.coefficients(path.p_ref))


def reference_integrals(path: StoredPath, cfg: Optional[SeriesKernelConfig] = None) -> IteratedIntegrals:
    """Fourier integrals at p = p_ref from the stored coefficients (h = 1, nothing drawn)."""
    w = WienerIncrement(path.w_std.values, 1.0)
    if path.m == 1:
        return assemble(w, LevyArea(np.zeros((1, 1))))
    return assemble(w, reference_levy_area(path, cfg))


def _coupled_inputs(alg: AlgorithmId, path: StoredPath, sums: TailSums, ops: VecOps, clamp: float) -> dict:
    if alg == AlgorithmId.MILSTEIN:
        return {"gamma_1": _gamma_1(sums)}
    sigma, sigma_2 = _tail_covariances(sums, ops)
    if alg == AlgorithmId.WIKTORSSON:
        gamma = _whitened(ops, sigma, sums.full, sums.weight, clamp)
        return {"gamma_lower": ops.lower_matrix(gamma)}
    gamma_2 = _whitened(ops, sigma_2, sums.partial, sums.weight, clamp)
    return {"gamma_1": _gamma_1(sums), "gamma_lower": ops.lower_matrix(gamma_2)}


def _coupled_area(
    alg: AlgorithmId,
    path: StoredPath,
    p: int,
    sums: Optional[TailSums],
    ops: VecOps,
    cfg: Optional[SeriesKernelConfig],
    clamp: float,
) -> LevyArea:
    inputs = {} if alg == AlgorithmId.FOURIER else _coupled_inputs(alg, path, sums, ops, clamp)
    return levy_area(alg, path.w_std, p, cfg, coefficients=path.coefficients(p), **inputs)


def coupled_levy_area(
    alg: AlgorithmId,
    path: StoredPath,
    p: int,
    ops: Optional[VecOps] = None,
    cfg: Optional[SeriesKernelConfig] = None,
    clamp: float = DEFAULT_CLAMP,
) -> LevyArea:
    """
    Approximation of `alg` at p driven by the stored path instead of fresh draws.

    The first p stored columns feed the series, the tail approximation uses
    the gammas extracted from columns p+1..p_ref. Fourier at p = p_ref
    reproduces the reference.
    """
    if alg == AlgorithmId.FOURIER and p == path.p_ref:
        sums = None
    else:
        sums = tail_sums(path, p)
    return _coupled_area(alg, path, p, sums, ops or make_vec_ops(path.m), cfg, clamp)


def reference_error(p_ref: int, h: float = 1.0) -> float:
    """Exact max,L2 distance between the reference and the exact integrals."""
    return h * math.sqrt(3.0 / (2.0 * math.pi**2) * trigamma_tail(p_ref))


def fourier_tail_error(p: int, p_ref: int, h: float = 1.0) -> float:
    """Exact max,L2 distance between Fourier at p and the reference at p_ref."""
    return h * math.sqrt(3.0 / (2.0 * math.pi**2) * tail_sum(p, p_ref))


class ErrorEstimate(NamedTuple):
    estimate: float
    std_error: float


@dataclass(frozen=True)
class ConvergenceRow:
    algorithm: AlgorithmId
    m: int
    h: float
    p: int
    cost: int
    error_est: float
    error_se: float
    bound: float
    reps: int
    seed: int


class _Moments:
    """Running mean and sum of squared deviations, folded in realization order."""

    def __init__(self, shape):
        self.count = 0
        self.mean = np.zeros(shape)
        self.m2 = np.zeros(shape)

    def add(self, x: np.ndarray):
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    def variance(self) -> np.ndarray:
        return self.m2 / (self.count - 1)


def _root_estimate(mean: float, variance: float, reps: int) -> ErrorEstimate:
    """sqrt of a mean of squares, standard error by the delta method."""
    if mean <= 0.0:
        return ErrorEstimate(0.0, 0.0)
    root = math.sqrt(mean)
    return ErrorEstimate(root, math.sqrt(max(variance, 0.0)) / (math.sqrt(reps) * 2.0 * root))


def _validate_cells(algs: Sequence[AlgorithmId], m: int, ps: Sequence[int], p_ref: int, reps: int):
    if reps < 2:
        raise LevyAreaValueError(f"Need at least 2 realizations, got {reps}")
    if p_ref < 1:
        raise LevyAreaValueError(f"p_ref must be positive, got {p_ref}")
    for p in ps:
        if p < 1 or p > p_ref:
            raise LevyAreaValueError(f"Truncation parameter {p} outside 1..p_ref={p_ref}")
    for alg in algs:
        for p in ps:
            if p == p_ref and alg != AlgorithmId.FOURIER:
                raise EmptyTailError(f"{alg.value} needs p < p_ref, got p = p_ref = {p_ref}")
    if m > MAX_DENSE_DIM and any(alg in (AlgorithmId.WIKTORSSON, AlgorithmId.MRONROE) for alg in algs):
        raise ResourceLimitError(f"Coupled tail covariances are limited to m <= {MAX_DENSE_DIM}, got m={m}")


def _realization_squares(
    k: int,
    root: GaussianSource,
    algs: Sequence[AlgorithmId],
    m: int,
    ps: Sequence[int],
    p_ref: int,
    ops: Optional[VecOps],
    cfg: Optional[SeriesKernelConfig],
    clamp: float,
) -> np.ndarray:
    """Squared entries of reference - approximation for every (p, alg) cell, shape (cells, m, m)."""
    path = StoredPath.simulate(m, p_ref, root.spawn(k))
    squares = np.zeros((len(ps) * len(algs), m, m))
    if m == 1:
        return squares

    reference = reference_levy_area(path, cfg).entries
    cell = 0
    for p in ps:
        sums = tail_sums(path, p) if p < p_ref else None
        for alg in algs:
            approximation = _coupled_area(alg, path, p, sums, ops, cfg, clamp)
            squares[cell] = (reference - approximation.entries) ** 2
            cell += 1
    return squares


def convergence_study(
    algs: Iterable[AlgorithmId],
    m: int,
    ps: Iterable[int],
    p_ref: int,
    reps: int,
    norm: ErrorNorm = ErrorNorm.MAX_L2,
    seed: Optional[int] = None,
    h: float = 1.0,
    workers: int = 1,
    cfg: Optional[SeriesKernelConfig] = None,
    clamp: float = DEFAULT_CLAMP,
) -> List[ConvergenceRow]:
    """
    Monte-Carlo errors of the algorithms against a coupled reference.

    Realization k draws its path from the child source spawn(k) of the root
    seed and is shared by every (alg, p) cell. Errors scale linearly in h, so
    the study runs at h = 1 and rescales.

    Args:
        algs (Iterable[AlgorithmId]): algorithms to compare
        m (int): dimension
        ps (Iterable[int]): truncation parameters, each at most p_ref
        p_ref (int): truncation parameter of the reference
        reps (int): number of realizations, at least 2
        norm (ErrorNorm): max,L2 or L2,F
        seed (int, optional): root seed, from system entropy when omitted
        h (float): step size the errors are reported for
        workers (int): threads evaluating realizations; results do not depend on it

    Returns:
        list[ConvergenceRow]: one row per (alg, p), ordered by p then algorithm
    """
    algs = list(algs)
    ps = list(ps)
    _validate_cells(algs, m, ps, p_ref, reps)
    if h <= 0.0:
        raise LevyAreaValueError(f"Step size must be positive, got {h}")
    root = GaussianSource(entropy_seed() if seed is None else seed)
    ops = make_vec_ops(m) if m <= MAX_DENSE_DIM else None

    cells = len(ps) * len(algs)
    entries = _Moments((cells, m, m))
    frobenius = _Moments(cells)

    def run(k: int) -> np.ndarray:
        return _realization_squares(k, root, algs, m, ps, p_ref, ops, cfg, clamp)

    progress_step = max(1, reps // 10)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        for k, squares in enumerate(executor.map(run, range(reps))):
            entries.add(squares)
            frobenius.add(squares.sum(axis=(1, 2)))
            if (k + 1) % progress_step == 0:
                logger.debug("Convergence study: %d/%d realizations", k + 1, reps)

    rows = []
    entry_variance = entries.variance()
    frobenius_variance = frobenius.variance()
    cell = 0
    for p in ps:
        for alg in algs:
            if norm == ErrorNorm.MAX_L2:
                worst = np.unravel_index(np.argmax(entries.mean[cell]), (m, m))
                estimate = _root_estimate(float(entries.mean[cell][worst]), float(entry_variance[cell][worst]), reps)
            else:
                estimate = _root_estimate(float(frobenius.mean[cell]), float(frobenius_variance[cell]), reps)
            rows.append(
                ConvergenceRow(
                    algorithm=alg,
                    m=m,
                    h=h,
                    p=p,
                    cost=cost(alg, m, p),
                    error_est=h * estimate.estimate,
                    error_se=h * estimate.std_error,
                    bound=error_bound(alg, m, h, p, norm),
                    reps=reps,
                    seed=root.seed,
                )
            )
            cell += 1
    return rows


def mc_error(
    alg: AlgorithmId,
    m: int,
    p: int,
    p_ref: int,
    reps: int,
    norm: ErrorNorm = ErrorNorm.MAX_L2,
    seed: Optional[int] = None,
    workers: int = 1,
) -> ErrorEstimate:
    """Monte-Carlo error of one (alg, p) cell at h = 1, see convergence_study."""
    row = convergence_study([alg], m, [p], p_ref, reps, norm, seed, workers=workers)[0]
    return ErrorEstimate(row.error_est, row.error_se)
