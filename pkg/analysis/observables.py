# elephantwalk/analysis/observables.py
"""Per-state and per-series quantities of a coined walk.

Everything here is a pure function of its inputs.
"""
from dataclasses import dataclass
from typing import NamedTuple, Tuple
import math

import numpy as np
from scipy import stats

from core.constants import (
    DEFAULT_WINDOW_FRACTION,
    NORM_TOLERANCE,
    RADICAND_TOLERANCE,
    STATIONARY_SLOPE_TOLERANCE,
)
from core.errors import DomainError
from core.state import WalkerState


class CoinDensityMatrix(NamedTuple):
    """Reduced coin state [[a, b], [conj(b), c]]"""
    a: float
    b: complex
    c: float

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [np.conj(self.b), self.c]], dtype=np.complex128)

    def is_valid(self, tolerance: float = NORM_TOLERANCE) -> bool:
        return (abs(self.a + self.c - 1.0) <= tolerance
                and self.a >= -tolerance and self.c >= -tolerance
                and abs(self.b) ** 2 <= self.a * self.c + 1e-12)


class PositionDistribution(NamedTuple):
    """P(x) on a contiguous window starting at `offset`"""
    offset: int
    probabilities: np.ndarray

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.probabilities.size, dtype=np.int64)

    @property
    def support_size(self) -> int:
        return int(self.probabilities.size)


def coin_density(state: WalkerState) -> CoinDensityMatrix:
    """Partial trace over position"""
    a = float(np.vdot(state.up, state.up).real)
    c = float(np.vdot(state.down, state.down).real)
    # sum_x up(x) conj(down(x))
    b = complex(np.vdot(state.down, state.up))
    return CoinDensityMatrix(a, b, c)


def eigenvalues(rho: CoinDensityMatrix) -> Tuple[float, float]:
    """(lambda_plus, lambda_minus) from the closed form for a trace-one 2x2 state"""
    radicand = 1.0 - 4.0 * (rho.a * rho.c - abs(rho.b) ** 2)
    if radicand < -RADICAND_TOLERANCE:
        raise DomainError(
            f"Negative radicand {radicand:.3e} in coin eigenvalues; "
            f"the density matrix is not positive (a={rho.a}, b={rho.b}, c={rho.c})")
    root = math.sqrt(min(max(radicand, 0.0), 1.0))
    return 0.5 * (1.0 + root), 0.5 * (1.0 - root)


def _entropy_term(p: float) -> float:
    if p <= 0.0:
        return 0.0
    return -p * math.log2(p)


def von_neumann_entropy(rho: CoinDensityMatrix) -> float:
    """Base-2 entropy of the coin state, in [0, 1]"""
    plus, minus = eigenvalues(rho)
    return min(1.0, _entropy_term(plus) + _entropy_term(minus))


def coherence_abs(rho: CoinDensityMatrix) -> float:
    return abs(rho.b)


def trace_distance(r1: CoinDensityMatrix, r2: CoinDensityMatrix) -> float:
    """Half the trace norm of r1 - r2, via the eigenvalues of the Hermitian difference"""
    d11 = r1.a - r2.a
    d22 = r1.c - r2.c
    d12 = r1.b - r2.b
    mid = 0.5 * (d11 + d22)
    half_gap = math.hypot(0.5 * (d11 - d22), abs(d12))
    return 0.5 * (abs(mid + half_gap) + abs(mid - half_gap))


def position_distribution(state: WalkerState) -> PositionDistribution:
    probabilities = np.abs(state.up) ** 2 + np.abs(state.down) ** 2
    return PositionDistribution(state.offset, probabilities)


def mean_position(dist: PositionDistribution) -> float:
    index = np.arange(dist.probabilities.size, dtype=np.float64)
    return dist.offset + float(index @ dist.probabilities)


def position_variance(dist: PositionDistribution) -> float:
    # Centred on the window to keep the subtraction well conditioned
    index = np.arange(dist.probabilities.size, dtype=np.float64)
    centre = float(index @ dist.probabilities)
    return float(((index - centre) ** 2) @ dist.probabilities)


def ipr(dist: PositionDistribution) -> float:
    """Inverse participation ratio (sum_x P(x)^2)^-1"""
    return 1.0 / float(dist.probabilities @ dist.probabilities)


@dataclass(frozen=True)
class QuasiStationaryWindow:
    """Trailing part of a series, starting at `start_fraction` of its length"""
    start_fraction: float = DEFAULT_WINDOW_FRACTION

    def __post_init__(self):
        if not 0.0 <= self.start_fraction < 1.0:
            raise DomainError(f"Window start fraction must lie in [0, 1), got {self.start_fraction}")

    def bounds(self, length: int) -> Tuple[int, int]:
        if length < 1:
            raise DomainError("Cannot window an empty series")
        t_min = min(int(math.floor(self.start_fraction * length)), length - 1)
        return t_min, length - 1


def window_slice(series: np.ndarray, window) -> Tuple[np.ndarray, np.ndarray]:
    series = np.asarray(series, dtype=np.float64)
    if isinstance(window, QuasiStationaryWindow):
        t_min, t_max = window.bounds(series.size)
    else:
        t_min, t_max = (int(v) for v in window)
    if t_min < 0 or t_max >= series.size or t_min > t_max:
        raise DomainError(f"Window ({t_min}, {t_max}) does not fit a series of length {series.size}")
    t = np.arange(t_min, t_max + 1)
    return t, series[t_min:t_max + 1]


def time_average(series, window=QuasiStationaryWindow()) -> Tuple[float, float]:
    """Arithmetic mean and sample standard deviation over the window"""
    _, values = window_slice(series, window)
    mean = float(np.mean(values))
    if values.size < 2 or np.all(values == values[0]):
        return (float(values[0]) if values.size else mean), 0.0
    return mean, float(np.std(values, ddof=1))


def is_quasi_stationary(series, window=QuasiStationaryWindow(),
                        tolerance: float = STATIONARY_SLOPE_TOLERANCE) -> bool:
    """Accept a window when the linear trend over it is below `tolerance` per step"""
    t, values = window_slice(series, window)
    if values.size < 2:
        return True
    slope = stats.linregress(t.astype(np.float64), values).slope
    return bool(abs(slope) < tolerance)
