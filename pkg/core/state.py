# elephantwalk/core/state.py
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple
import math

import numpy as np

from core.constants import GAUSSIAN_TRUNCATION_SIGMAS, NORM_TOLERANCE
from core.errors import DomainError


class PhaseConvention(Enum):
    HALF = "half"   # e^{i phi/2}, the Bloch-state formula as written
    FULL = "full"   # e^{i phi}


@dataclass(frozen=True)
class CoinBlochParams:
    omega: float
    phi: float = 0.0
    phase_convention: PhaseConvention = PhaseConvention.HALF

    def __post_init__(self):
        for name in ('omega', 'phi'):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"Bloch angle {name} must be finite, got {getattr(self, name)}")

    @property
    def relative_phase(self) -> float:
        if self.phase_convention is PhaseConvention.FULL:
            return self.phi
        return self.phi / 2


@dataclass(frozen=True)
class GaussianInitParams:
    sigma2: float
    truncation_radius: Optional[int] = None

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    def resolved_radius(self) -> int:
        """Stored half-width, ceil(6 sigma) unless given explicitly"""
        minimum = max(1, math.ceil(GAUSSIAN_TRUNCATION_SIGMAS * self.sigma))
        if self.truncation_radius is None:
            return minimum
        if self.truncation_radius < GAUSSIAN_TRUNCATION_SIGMAS * self.sigma:
            raise DomainError(
                f"Truncation radius {self.truncation_radius} is below "
                f"{GAUSSIAN_TRUNCATION_SIGMAS} sigma = {GAUSSIAN_TRUNCATION_SIGMAS * self.sigma:.3f}")
        return int(self.truncation_radius)


@dataclass
class WalkerState:
    """Spinor amplitudes on a contiguous window of lattice sites.

    Site x is stored at index x - offset in both `up` and `down`.
    """
    offset: int
    up: np.ndarray
    down: np.ndarray
    time: int = 0

    def __post_init__(self):
        self.up = np.asarray(self.up, dtype=np.complex128)
        self.down = np.asarray(self.down, dtype=np.complex128)
        if self.up.shape != self.down.shape or self.up.ndim != 1:
            raise DomainError(
                f"Spin-up and spin-down windows must be 1-D and equal in length, "
                f"got {self.up.shape} and {self.down.shape}")
        if self.time < 0:
            raise DomainError(f"Walker time must be non-negative, got {self.time}")

    def __len__(self) -> int:
        return self.up.size

    @property
    def bounds(self) -> Tuple[int, int]:
        return self.offset, self.offset + self.up.size - 1

    def positions(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.up.size, dtype=np.int64)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.up) ** 2) + np.sum(np.abs(self.down) ** 2))

    def is_normalized(self, tolerance: float = NORM_TOLERANCE) -> bool:
        return abs(self.norm() - 1.0) <= tolerance

    def amplitude_at(self, x: int) -> Tuple[complex, complex]:
        index = x - self.offset
        if 0 <= index < self.up.size:
            return complex(self.up[index]), complex(self.down[index])
        return 0j, 0j

    def copy(self) -> 'WalkerState':
        return WalkerState(self.offset, self.up.copy(), self.down.copy(), self.time)


def make_coin_state(params: CoinBlochParams) -> np.ndarray:
    """cos(omega/2)|up> + e^{i chi} sin(omega/2)|down>, chi set by the phase convention"""
    return np.array([
        math.cos(params.omega / 2),
        np.exp(1j * params.relative_phase) * math.sin(params.omega / 2),
    ], dtype=np.complex128)


def _check_spinor(coin) -> np.ndarray:
    spinor = np.asarray(coin, dtype=np.complex128).reshape(-1)
    if spinor.size != 2:
        raise DomainError(f"Coin spinor must have two components, got {spinor.size}")
    norm = float(np.sum(np.abs(spinor) ** 2))
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise DomainError(f"Coin spinor must be normalized, got norm {norm}")
    return spinor


def make_localized_state(coin) -> WalkerState:
    spinor = _check_spinor(coin)
    return WalkerState(0, spinor[:1].copy(), spinor[1:].copy(), 0)


def make_gaussian_state(params: GaussianInitParams, coin) -> WalkerState:
    """Gaussian position profile N exp(-x^2 / 4 sigma^2) times the coin spinor"""
    if not math.isfinite(params.sigma2) or params.sigma2 <= 0:
        raise DomainError(
            f"Gaussian initial state needs sigma2 > 0, got {params.sigma2}; "
            f"use make_localized_state for a point mass")
    spinor = _check_spinor(coin)
    radius = params.resolved_radius()
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    profile = np.exp(-x ** 2 / (4.0 * params.sigma2))
    # Renormalising absorbs the truncated tails
    profile /= math.sqrt(float(np.sum(profile ** 2)))
    return WalkerState(-radius, profile * spinor[0], profile * spinor[1], 0)


def orthey_phase(omega: float) -> float:
    """Relative phase phi with cos(phi) = -cot(omega).

    For a wide Gaussian Hadamard walk this is the coin state whose asymptotic coin
    density is maximally mixed. The relation holds for the phase actually carried by
    the spinor, so pair it with PhaseConvention.FULL when building the coin state.
    """
    if not math.isfinite(omega):
        raise DomainError(f"Bloch angle omega must be finite, got {omega}")
    sin_omega = math.sin(omega)
    if abs(sin_omega) < 1e-15:
        raise DomainError(f"cot(omega) is undefined at omega = {omega}")
    cot = math.cos(omega) / sin_omega
    if abs(cot) > 1.0 + 1e-12:
        raise DomainError(
            f"No real phase satisfies cos(phi) = -cot(omega) for omega = {omega} "
            f"(cot = {cot:.6f}); omega must lie in [pi/4, 3pi/4]")
    return math.acos(min(1.0, max(-1.0, -cot)))
