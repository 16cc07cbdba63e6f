import logging
from typing import Optional

import numpy as np

from .errors import LevyAreaValueError

logger = logging.getLogger(__name__)

_UINT64_MASK = (1 << 64) - 1


def entropy_seed() -> int:
    """Return a fresh 64-bit seed drawn from system entropy."""
    return int(np.random.SeedSequence().entropy) & _UINT64_MASK


class GaussianSource:
    def __init__(self, seed: Optional[int] = None):
        """
        Counting source of i.i.d. standard normal numbers.

        The bit generator is Philox (counter based) seeded through a
        SeedSequence, normals come from Generator.standard_normal. The same
        seed always reproduces the same sequence of draws.

        Args:
            seed (int, optional): 64-bit unsigned seed. Drawn from system
                entropy when omitted; read it back from `seed` to rerun.
        """
        if seed is None:
            seed = entropy_seed()
        seed = int(seed)
        if seed < 0 or seed > _UINT64_MASK:
            raise LevyAreaValueError(f"Seed must be a 64-bit unsigned integer, got {seed}")

        self._seed = seed
        self._generator = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
        self._draw_count = 0

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def draw_count(self) -> int:
        """Total number of standard normal values emitted so far."""
        return self._draw_count

    def __repr__(self):
        return f"GaussianSource(seed={self._seed}, draw_count={self._draw_count})"

    def standard_normal(self, n: int) -> np.ndarray:
        """Draw n standard normal values as a flat vector."""
        if n < 0:
            raise LevyAreaValueError(f"Cannot draw a negative number of values ({n})")
        values = self._generator.standard_normal(n)
        self._draw_count += n
        return values

    def spawn(self, k: int) -> "GaussianSource":
        """
        Derive the k-th independent child source.

        seed_k is the first 64-bit word of SeedSequence(seed, spawn_key=(k,)),
        so children of the same root are reproducible and independent of the
        order in which they are created.
        """
        if k < 0:
            raise LevyAreaValueError(f"Stream index must be non-negative, got {k}")
        sequence = np.random.SeedSequence(self._seed, spawn_key=(k,))
        child_seed = int(sequence.generate_state(1, dtype=np.uint64)[0])
        return GaussianSource(child_seed)


def draw_vector(src: GaussianSource, n: int) -> np.ndarray:
    return src.standard_normal(n)


def draw_matrix(src: GaussianSource, rows: int, cols: int) -> np.ndarray:
    """
    Draw a rows x cols matrix of i.i.d. N(0, 1) values.

    Values fill the matrix column by column (the vec order), so column r of
    the result only depends on the draws made for columns 1..r.
    """
    if rows < 0 or cols < 0:
        raise LevyAreaValueError(f"Matrix shape must be non-negative, got ({rows}, {cols})")
    return src.standard_normal(rows * cols).reshape((rows, cols), order="F")


def strict_lower_indices(m: int):
    """
    Row and column indices of the strict lower triangle in K_m order.

    The order is column-major: (2,1), (3,1), ..., (m,1), (3,2), ... (1-based),
    which is the row order of the selection matrix K_m.
    """
    cols, rows = np.triu_indices(m, k=1)
    return rows, cols


def draw_strict_lower(src: GaussianSource, m: int) -> np.ndarray:
    """Draw an m x m matrix with N(0, 1) entries below the diagonal and zeros elsewhere."""
    if m < 1:
        raise LevyAreaValueError(f"Dimension must be at least 1, got {m}")
    rows, cols = strict_lower_indices(m)
    lower = np.zeros((m, m))
    lower[rows, cols] = src.standard_normal(rows.size)
    return lower
