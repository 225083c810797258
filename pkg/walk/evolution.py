# elephantwalk/walk/evolution.py
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Optional
import logging
import math
import time

import numpy as np

from analysis.observables import (
    CoinDensityMatrix,
    PositionDistribution,
    coherence_abs,
    coin_density,
    ipr,
    mean_position,
    position_distribution,
    position_variance,
    trace_distance,
    von_neumann_entropy,
)
from core.coins import CoinOperator
from core.constants import DEFAULT_ENSEMBLE_SIZE, DEFAULT_SEED, DEFAULT_STEPS
from core.errors import DomainError
from core.state import (
    CoinBlochParams,
    GaussianInitParams,
    WalkerState,
    make_coin_state,
    make_gaussian_state,
    make_localized_state,
)
from walk.sampler import SeededRng, format_q, is_deterministic, parse_q, sample_steps

logger = logging.getLogger(__name__)


class Observable(Enum):
    ENTROPY = "entropy"
    VARIANCE = "variance"
    COHERENCE = "coherence"
    IPR = "ipr"
    TRACE_DISTANCE = "trace_distance"
    MEAN_POSITION = "mean_position"


ALL_OBSERVABLES = frozenset(Observable)
_COIN_OBSERVABLES = {Observable.ENTROPY, Observable.COHERENCE, Observable.TRACE_DISTANCE}
_POSITION_OBSERVABLES = {Observable.VARIANCE, Observable.IPR, Observable.MEAN_POSITION}


@dataclass(frozen=True)
class InitialStateSpec:
    coin: CoinBlochParams
    sigma2: float = 0.0
    truncation_radius: Optional[int] = None

    def __post_init__(self):
        if not math.isfinite(self.sigma2) or self.sigma2 < 0:
            raise DomainError(f"Initial position variance must be >= 0, got {self.sigma2}")

    @property
    def localized(self) -> bool:
        return self.sigma2 == 0

    def build(self) -> WalkerState:
        spinor = make_coin_state(self.coin)
        if self.localized:
            return make_localized_state(spinor)
        return make_gaussian_state(GaussianInitParams(self.sigma2, self.truncation_radius), spinor)

    def describe(self) -> dict:
        return {
            'omega': self.coin.omega,
            'phi': self.coin.phi,
            'phase_convention': self.coin.phase_convention.value,
            'sigma2': self.sigma2,
            'truncation_radius': self.truncation_radius,
        }


@dataclass(frozen=True)
class WalkConfig:
    coin: CoinOperator
    step_q: float
    initial_state: InitialStateSpec
    total_steps: int = DEFAULT_STEPS
    base_seed: int = DEFAULT_SEED
    ensemble_size: int = DEFAULT_ENSEMBLE_SIZE
    observables: FrozenSet[Observable] = ALL_OBSERVABLES
    keep_final_distribution: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'step_q', parse_q(self.step_q))
        object.__setattr__(self, 'observables', frozenset(Observable(o) for o in self.observables))
        if int(self.total_steps) != self.total_steps or self.total_steps < 1:
            raise DomainError(f"total_steps must be a positive integer, got {self.total_steps}")
        if int(self.ensemble_size) != self.ensemble_size or self.ensemble_size < 1:
            raise DomainError(f"ensemble_size must be a positive integer, got {self.ensemble_size}")
        if self.base_seed < 0:
            raise DomainError(f"base_seed must be non-negative, got {self.base_seed}")

    @property
    def deterministic(self) -> bool:
        return is_deterministic(self.step_q)

    def describe(self) -> dict:
        return {
            'coin': self.coin.describe(),
            'q': format_q(self.step_q),
            'initial_state': self.initial_state.describe(),
            'total_steps': self.total_steps,
            'base_seed': self.base_seed,
            'ensemble_size': self.ensemble_size,
            'observables': sorted(o.value for o in self.observables),
        }


@dataclass
class RunRecord:
    """One trajectory: its seed, sampled steps and observable series indexed by t = 0..T"""
    run_index: int
    seed: int
    steps: np.ndarray
    series: Dict[Observable, np.ndarray]
    final_distribution: Optional[PositionDistribution] = None
    elapsed: float = field(default=0.0, compare=False)

    @property
    def total_steps(self) -> int:
        return int(self.steps.size)

    def __getitem__(self, observable) -> np.ndarray:
        return self.series[Observable(observable)]


def step(state: WalkerState, coin: CoinOperator, delta: int) -> WalkerState:
    """Coin toss then a shift by +delta (spin up) and -delta (spin down).

    The window grows by delta on each side; the input state is left untouched.
    """
    delta = int(delta)
    if delta < 1:
        raise DomainError(f"Step size must be >= 1, got {delta}")
    m = coin.matrix
    tossed_up = m[0, 0] * state.up + m[0, 1] * state.down
    tossed_down = m[1, 0] * state.up + m[1, 1] * state.down

    size = state.up.size
    up = np.zeros(size + 2 * delta, dtype=np.complex128)
    down = np.zeros(size + 2 * delta, dtype=np.complex128)
    up[2 * delta:] = tossed_up
    down[:size] = tossed_down
    return WalkerState(state.offset - delta, up, down, state.time + 1)


class _SeriesRecorder:
    """Fills the selected observable series as the walk advances"""

    def __init__(self, observables: Iterable[Observable], total_steps: int):
        self.observables = frozenset(observables)
        self.series = {o: np.empty(total_steps + 1) for o in self.observables}
        self.needs_coin = bool(self.observables & _COIN_OBSERVABLES)
        self.needs_position = bool(self.observables & _POSITION_OBSERVABLES)
        self._previous: Optional[CoinDensityMatrix] = None

    def record(self, t: int, state: WalkerState):
        if self.needs_coin:
            rho = coin_density(state)
            if Observable.ENTROPY in self.series:
                self.series[Observable.ENTROPY][t] = von_neumann_entropy(rho)
            if Observable.COHERENCE in self.series:
                self.series[Observable.COHERENCE][t] = coherence_abs(rho)
            if Observable.TRACE_DISTANCE in self.series:
                self.series[Observable.TRACE_DISTANCE][t] = (
                    np.nan if self._previous is None else trace_distance(rho, self._previous))
            self._previous = rho
        if self.needs_position:
            dist = position_distribution(state)
            if Observable.VARIANCE in self.series:
                self.series[Observable.VARIANCE][t] = position_variance(dist)
            if Observable.IPR in self.series:
                self.series[Observable.IPR][t] = ipr(dist)
            if Observable.MEAN_POSITION in self.series:
                self.series[Observable.MEAN_POSITION][t] = mean_position(dist)


def evolve(config: WalkConfig, run_index: int = 0):
    """Yield (delta_t, state) for t = 1..T; the t = 0 state comes first with delta 0"""
    rng = SeededRng.for_run(config.base_seed, run_index)
    state = config.initial_state.build()
    yield 0, state
    for delta in sample_steps(config.step_q, config.total_steps, rng):
        state = step(state, config.coin, delta)
        yield int(delta), state


def run_trajectory(config: WalkConfig, run_index: int = 0) -> RunRecord:
    """Pure function of (config, run_index)"""
    start_time = time.time()
    recorder = _SeriesRecorder(config.observables, config.total_steps)
    steps = np.empty(config.total_steps, dtype=np.int64)
    state = None
    for t, (delta, state) in enumerate(evolve(config, run_index)):
        if t > 0:
            steps[t - 1] = delta
        recorder.record(t, state)

    final = position_distribution(state) if config.keep_final_distribution else None
    elapsed = time.time() - start_time
    seed = config.base_seed + run_index
    logger.debug("Run %d (seed %d): %d steps, window %d sites, %.3fs",
                 run_index, seed, config.total_steps, len(state), elapsed)
    return RunRecord(run_index, seed, steps, recorder.series, final, elapsed)
