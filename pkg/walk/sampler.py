# elephantwalk/walk/sampler.py
"""Discretized q-exponential step law and its seeded sampler.

The PMF over step sizes at time t is

    Pr(delta) = tau_t [1 - (1 - q) delta]^{1/(1-q)},  delta in {1, ..., t}

restricted to the points where the bracket is positive. q = 1 is the exponential
limit e^{-delta}; q = inf is the uniform law over {1, ..., t}.
"""
from dataclasses import dataclass, field
from typing import Union
import math

import numpy as np

from core.constants import Q_MIN, Q_ONE_TOLERANCE
from core.errors import DomainError

INFINITE_Q = math.inf
_INFINITE_NAMES = {'inf', 'infinity', '+inf', '∞'}


def parse_q(value: Union[float, int, str]) -> float:
    """Accept a number or one of the infinite sentinels ('inf', 'infinity', '∞')"""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in _INFINITE_NAMES:
            return INFINITE_Q
        try:
            value = float(text)
        except ValueError:
            raise DomainError(f"q must be a number or 'inf', got {value!r}")
    q = float(value)
    if math.isnan(q):
        raise DomainError("q must not be NaN")
    if q < Q_MIN:
        raise DomainError(f"q must be at least {Q_MIN} (or 'inf'), got {q}")
    return q


def format_q(q: float) -> str:
    return 'inf' if math.isinf(q) else repr(float(q))


def is_deterministic(q: float) -> bool:
    """True when only unit steps carry probability, i.e. the standard walk"""
    return not math.isinf(q) and q <= Q_MIN


@dataclass(frozen=True)
class StepDistribution:
    q: float
    t: int
    weights: np.ndarray = field(repr=False, compare=False)
    tau: float = 1.0

    @property
    def probabilities(self) -> np.ndarray:
        return self.weights * self.tau

    @property
    def cdf(self) -> np.ndarray:
        return np.cumsum(self.probabilities)

    @property
    def support(self) -> np.ndarray:
        return np.arange(1, self.t + 1)

    @property
    def max_step(self) -> int:
        """Largest step size with positive probability"""
        return int(np.flatnonzero(self.weights > 0)[-1]) + 1

    def probability(self, delta: int) -> float:
        if 1 <= delta <= self.t:
            return float(self.probabilities[delta - 1])
        return 0.0


def _log_weights(q: float, deltas: np.ndarray) -> np.ndarray:
    if abs(q - 1.0) < Q_ONE_TOLERANCE:
        return -deltas
    base = 1.0 - (1.0 - q) * deltas
    log_w = np.full(deltas.shape, -np.inf)
    inside = base > 0
    log_w[inside] = np.log(base[inside]) / (1.0 - q)
    return log_w


def qexp_pmf(q: Union[float, str], t: int) -> StepDistribution:
    """Build the normalised step law for time step t"""
    q = parse_q(q)
    if int(t) != t or t < 1:
        raise DomainError(f"Time step t must be a positive integer, got {t}")
    t = int(t)

    if math.isinf(q):
        weights = np.ones(t)
        return StepDistribution(q, t, weights, 1.0 / t)

    deltas = np.arange(1, t + 1, dtype=np.float64)
    log_w = _log_weights(q, deltas)
    # Delta = 1 always lies inside the support for q >= 1/2
    top = float(np.max(log_w))
    weights = np.exp(log_w - top)
    # Exact zeros outside the support; exp(-inf) is already 0 but keep it explicit
    weights[~np.isfinite(log_w)] = 0.0
    total = float(np.sum(weights))
    # tau is the reciprocal of the unshifted weight sum
    tau = math.exp(-top) / total
    normalised = weights / total
    return StepDistribution(q, t, normalised / tau, tau)


class SeededRng:
    """PCG64 stream; ensemble run i uses seed base_seed + i"""

    def __init__(self, seed: int):
        self.seed = int(seed)
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise DomainError(f"Seed must fit in an unsigned 64-bit integer, got {seed}")
        self.generator = np.random.Generator(np.random.PCG64(self.seed))

    @classmethod
    def for_run(cls, base_seed: int, run_index: int) -> 'SeededRng':
        return cls(int(base_seed) + int(run_index))

    def uniform(self) -> float:
        return float(self.generator.random())

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed})"


def sample_step(dist: StepDistribution, rng: SeededRng) -> int:
    """Inverse-CDF draw of one step size"""
    if dist.t == 1:
        return 1
    cdf = dist.cdf
    u = rng.uniform() * cdf[-1]
    index = int(np.searchsorted(cdf, u, side='right'))
    # u can round up to cdf[-1]; never land on a zero-weight tail
    return min(index + 1, dist.max_step)


def sample_steps(q: Union[float, str], total_steps: int, rng: SeededRng) -> np.ndarray:
    """Step sizes delta_1 ... delta_T, one PMF rebuild per time step"""
    q = parse_q(q)
    steps = np.ones(total_steps, dtype=np.int64)
    if is_deterministic(q):
        return steps
    for t in range(1, total_steps + 1):
        steps[t - 1] = sample_step(qexp_pmf(q, t), rng)
    return steps
