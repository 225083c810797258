import math

import numpy as np
import pytest

from core.coins import CoinKind, CoinOperator, build_coin, coin_general, coin_hadamard, coin_kempe
from core.errors import DomainError

SQRT_HALF = 1 / math.sqrt(2)


@pytest.mark.parametrize("angles, expected", [
    ((math.pi / 4, 0, 0), SQRT_HALF * np.array([[1, 1], [1, -1]])),
    ((0, 0, 0), np.array([[1, 0], [0, -1]])),
    ((math.pi / 2, math.pi / 2, math.pi / 2), np.array([[0, 1j], [1j, 0]])),
])
def test_coin_general_special_points(angles, expected):
    np.testing.assert_allclose(coin_general(*angles).matrix, expected, atol=1e-15)


@pytest.mark.parametrize("theta, expected", [
    (0, np.eye(2)),
    (math.pi / 4, SQRT_HALF * np.array([[1, 1j], [1j, 1]])),
    (math.pi / 2, np.array([[0, 1j], [1j, 0]])),
])
def test_coin_kempe(theta, expected):
    np.testing.assert_allclose(coin_kempe(theta).matrix, expected, atol=1e-15)


def test_hadamard_matches_general_quarter_turn():
    np.testing.assert_allclose(coin_hadamard().matrix, coin_general(math.pi / 4, 0, 0).matrix, atol=1e-15)


def test_every_coin_on_a_grid_is_unitary():
    rng = np.random.default_rng(7)
    for theta, beta, gamma in rng.uniform([0, -math.pi, -math.pi], [math.pi / 2, math.pi, math.pi], (200, 3)):
        assert coin_general(theta, beta, gamma).is_unitary()
        assert coin_kempe(theta).is_unitary()


def test_theta_out_of_range():
    with pytest.raises(DomainError):
        coin_general(math.pi / 2 + 0.01, 0, 0)
    with pytest.raises(DomainError):
        coin_kempe(-0.1)


def test_non_finite_angles_rejected():
    with pytest.raises(DomainError):
        coin_general(0.3, float('nan'), 0)
    with pytest.raises(DomainError):
        coin_general(0.3, 0, float('inf'))


def test_theta_from_degrees_is_clipped():
    coin = coin_general(math.radians(90), 0, 0)
    assert coin.theta == pytest.approx(math.pi / 2)
    assert coin.theta <= math.pi / 2


def test_matrix_is_read_only():
    coin = coin_hadamard()
    with pytest.raises(ValueError):
        coin.matrix[0, 0] = 2


def test_operator_without_matrix_builds_general_form():
    coin = CoinOperator(math.pi / 4, 0.0, 0.0)
    np.testing.assert_allclose(coin.matrix, coin_hadamard().matrix, atol=1e-15)


def test_build_coin_dispatch():
    assert build_coin(CoinKind.KEMPE, math.pi / 4).kind is CoinKind.KEMPE
    assert build_coin("hadamard", 0.1).theta == pytest.approx(math.pi / 4)
    general = build_coin(CoinKind.GENERAL, 0.2, 0.3, 0.4)
    assert (general.theta, general.beta, general.gamma) == (0.2, 0.3, 0.4)
    with pytest.raises(DomainError):
        build_coin("grover", 0.1)


def test_non_unitary_matrix_rejected():
    with pytest.raises(DomainError, match="not unitary"):
        CoinOperator(0.0, 0.0, 0.0, CoinKind.GENERAL, np.array([[1, 1], [0, 1]]))
    assert CoinOperator(0.0, 0.0, 0.0, CoinKind.GENERAL, np.eye(2)).is_unitary()
