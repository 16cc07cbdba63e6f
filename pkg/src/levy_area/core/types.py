from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError, LevyAreaValueError


class AlgorithmId(Enum):
    FOURIER = "fourier"
    MILSTEIN = "milstein"
    WIKTORSSON = "wiktorsson"
    MRONROE = "mronroe"

    @classmethod
    def from_name(cls, name: str) -> "AlgorithmId":
        """Parse a case-insensitive algorithm name, e.g. 'MronRoe'."""
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise LevyAreaValueError(
                f"Unknown algorithm '{name}', expected one of {[a.value for a in cls]}"
            ) from None


class ErrorNorm(Enum):
    # max over entries of the entrywise L2(Omega) norm
    MAX_L2 = "maxl2"
    # L2(Omega) norm of the Frobenius norm
    FROBENIUS_L2 = "frobeniusl2"

    @classmethod
    def from_name(cls, name: str) -> "ErrorNorm":
        """Parse a case-insensitive norm name, e.g. 'FrobeniusL2'."""
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise LevyAreaValueError(
                f"Unknown error norm '{name}', expected one of {[n.value for n in cls]}"
            ) from None


def _as_finite_vector(values, what: str) -> np.ndarray:
    vector = np.asarray(values, dtype=np.float64)
    if vector.ndim != 1 or vector.size < 1:
        raise LevyAreaValueError(f"{what} must be a non-empty vector, got shape {vector.shape}")
    if not np.all(np.isfinite(vector)):
        raise LevyAreaValueError(f"{what} must have finite entries")
    return vector


def _as_square(entries, what: str) -> np.ndarray:
    matrix = np.asarray(entries, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"{what} must be a square matrix, got shape {matrix.shape}")
    return matrix


@dataclass(frozen=True)
class StandardizedIncrement:
    """
    Wiener increment divided by the square root of its step, i.e. W_h / sqrt(h).

    Args:
        values (np.ndarray): vector of length m, dimensionless
    """

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_finite_vector(self.values, "Standardized increment"))

    @property
    def dim(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class WienerIncrement:
    """
    Increment W_h of an m-dimensional Wiener process over a step of length h.

    Args:
        values (np.ndarray): vector of length m (units: sqrt(time))
        step (float): the step size h > 0
    """

    values: np.ndarray
    step: float

    def __post_init__(self):
        object.__setattr__(self, "values", _as_finite_vector(self.values, "Wiener increment"))
        step = float(self.step)
        if not np.isfinite(step) or step <= 0.0:
            raise LevyAreaValueError(f"Step size must be positive and finite, got {self.step}")
        object.__setattr__(self, "step", step)

    @property
    def dim(self) -> int:
        return self.values.size

    def standardize(self) -> StandardizedIncrement:
        return StandardizedIncrement(self.values / np.sqrt(self.step))

    @classmethod
    def sample(cls, m: int, step: float, src) -> "WienerIncrement":
        """Draw W_h ~ N(0, h I_m) from a GaussianSource (m draws)."""
        from .gaussian_source import draw_vector

        return cls(np.sqrt(step) * draw_vector(src, m), step)


@dataclass(frozen=True)
class LevyArea:
    """
    Skew-symmetric m x m matrix of Levy areas A(h).

    Args:
        entries (np.ndarray): m x m matrix with entries == -entries.T
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = _as_square(self.entries, "Levy area")
        if not np.array_equal(entries, -entries.T):
            raise LevyAreaValueError("Levy area must be exactly skew-symmetric")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def scaled(self, step: float) -> "LevyArea":
        """Rescale a standardized (h = 1) Levy area to step h."""
        return LevyArea(step * self.entries)


@dataclass(frozen=True)
class IteratedIntegrals:
    """
    m x m matrix of twofold iterated Ito integrals I(h).

    The symmetric part is known exactly: I + I.T = W W.T - h I_m.
    """

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_square(self.entries, "Iterated integrals"))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def levy_area(self) -> LevyArea:
        return LevyArea(0.5 * (self.entries - self.entries.T))

    def stratonovich(self, step: float) -> np.ndarray:
        """Stratonovich counterpart J = I + h/2 * I_m."""
        return self.entries + 0.5 * step * np.eye(self.dim)
