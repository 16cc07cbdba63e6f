from levy_area.core.gaussian_source import GaussianSource
from levy_area.core.integrals import (
    QWienerSpec,
    assemble,
    iterated_integrals,
    simulate,
    simulate_levy_area,
    simulate_qwiener,
)
from levy_area.core.levy_algorithms import SeriesKernelConfig, levy_area
from levy_area.core.selection import SelectionQuery, achievable_error, cutoff, optimal_algorithm
from levy_area.core.types import AlgorithmId, ErrorNorm, IteratedIntegrals, LevyArea, WienerIncrement

__version__ = "0.1.0"
