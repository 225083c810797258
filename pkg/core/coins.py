# elephantwalk/core/coins.py
from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from core.constants import UNITARY_TOLERANCE
from core.errors import DomainError


class CoinKind(Enum):
    KEMPE = "kempe"
    HADAMARD = "hadamard"
    GENERAL = "general"


@dataclass(frozen=True)
class CoinOperator:
    """2x2 unitary coin toss parameterised by (theta, beta, gamma).

    The four entries are materialised once in `matrix` (complex128, read-only).
    """
    theta: float
    beta: float
    gamma: float
    kind: CoinKind = CoinKind.GENERAL
    matrix: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.matrix is None:
            object.__setattr__(self, 'matrix', _general_matrix(self.theta, self.beta, self.gamma))
        matrix = np.array(self.matrix, dtype=np.complex128)
        if matrix.shape != (2, 2):
            raise DomainError(f"Coin matrix must be 2x2, got shape {matrix.shape}")
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)
        if not self.is_unitary():
            raise DomainError(f"Coin matrix is not unitary within {UNITARY_TOLERANCE}: {matrix.tolist()}")

    def is_unitary(self, tolerance: float = UNITARY_TOLERANCE) -> bool:
        product = self.matrix.conj().T @ self.matrix
        return bool(np.all(np.abs(product - np.eye(2)) <= tolerance))

    def describe(self) -> dict:
        return {
            'kind': self.kind.value,
            'theta': self.theta,
            'beta': self.beta,
            'gamma': self.gamma,
        }


def _check_angle(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"Coin angle {name} must be finite, got {value}")
    return value


def _check_theta(theta: float) -> float:
    theta = _check_angle('theta', theta)
    # Grid values converted from degrees can overshoot pi/2 by an ulp
    if theta < -1e-12 or theta > math.pi / 2 + 1e-12:
        raise DomainError(f"Coin angle theta must lie in [0, pi/2], got {theta}")
    return min(max(theta, 0.0), math.pi / 2)


def _general_matrix(theta: float, beta: float, gamma: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([
        [c, s * np.exp(1j * beta)],
        [s * np.exp(1j * gamma), -c * np.exp(1j * (gamma + beta))],
    ], dtype=np.complex128)


def coin_general(theta: float, beta: float, gamma: float) -> CoinOperator:
    """Most general U(2) coin up to a global phase"""
    theta = _check_theta(theta)
    beta = _check_angle('beta', beta)
    gamma = _check_angle('gamma', gamma)
    return CoinOperator(theta, beta, gamma, CoinKind.GENERAL, _general_matrix(theta, beta, gamma))


def coin_hadamard() -> CoinOperator:
    matrix = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)
    return CoinOperator(math.pi / 4, 0.0, 0.0, CoinKind.HADAMARD, matrix)


def coin_kempe(theta: float) -> CoinOperator:
    """Kempe coin [[cos, i sin], [i sin, cos]], taken verbatim rather than via coin_general"""
    theta = _check_theta(theta)
    c, s = math.cos(theta), math.sin(theta)
    matrix = np.array([[c, 1j * s], [1j * s, c]], dtype=np.complex128)
    return CoinOperator(theta, math.pi / 2, math.pi / 2, CoinKind.KEMPE, matrix)


_COIN_BUILDERS = {
    CoinKind.KEMPE: lambda theta, beta, gamma: coin_kempe(theta),
    CoinKind.HADAMARD: lambda theta, beta, gamma: coin_hadamard(),
    CoinKind.GENERAL: coin_general,
}


def build_coin(kind: CoinKind, theta: float = math.pi / 4, beta: float = 0.0, gamma: float = 0.0) -> CoinOperator:
    """Build a coin of the given family; theta is ignored for the Hadamard coin"""
    try:
        builder = _COIN_BUILDERS[CoinKind(kind)]
    except ValueError:
        valid = ', '.join(k.value for k in CoinKind)
        raise DomainError(f"Unsupported coin kind {kind!r}. Valid options are: {valid}")
    return builder(theta, beta, gamma)
