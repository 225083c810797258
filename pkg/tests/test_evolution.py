import math

import numpy as np
import pytest

from analysis.observables import coin_density, position_distribution, position_variance
from core.coins import coin_general, coin_hadamard, coin_kempe
from core.errors import DomainError
from core.state import CoinBlochParams, GaussianInitParams, WalkerState, make_gaussian_state, make_localized_state
from walk.evolution import (
    InitialStateSpec,
    Observable,
    WalkConfig,
    evolve,
    run_trajectory,
    step,
)

SQRT_HALF = 1 / math.sqrt(2)
EQUATOR = CoinBlochParams(math.pi / 2, 0.0)


def _config(q, steps=40, coin=None, sigma2=0.0, **kwargs):
    return WalkConfig(coin or coin_kempe(math.pi / 4), q, InitialStateSpec(EQUATOR, sigma2),
                      total_steps=steps, **kwargs)


def _textbook_walk(coin_matrix, spinor, steps):
    """Unit-step coined walk on a dict lattice: coin toss then up moves right, down moves left"""
    (a, b), (c, d) = coin_matrix
    amplitudes = {0: (complex(spinor[0]), complex(spinor[1]))}
    for _ in range(steps):
        shifted = {}
        for x, (up, down) in amplitudes.items():
            new_up, new_down = a * up + b * down, c * up + d * down
            right = shifted.get(x + 1, (0j, 0j))
            shifted[x + 1] = (right[0] + new_up, right[1])
            left = shifted.get(x - 1, (0j, 0j))
            shifted[x - 1] = (left[0], left[1] + new_down)
        amplitudes = shifted
    return amplitudes


def test_identity_like_coin_transports_spin_up():
    state = step(make_localized_state([1, 0]), coin_general(0, 0, 0), 1)
    assert state.amplitude_at(1) == (1, 0)
    assert np.sum(np.abs(state.up) ** 2 + np.abs(state.down) ** 2) == 1
    assert state.time == 1


def test_three_step_hadamard_walk():
    state = make_localized_state([SQRT_HALF, SQRT_HALF])
    for _ in range(3):
        state = step(state, coin_hadamard(), 1)
    dist = position_distribution(state)
    probabilities = dict(zip(dist.positions.tolist(), dist.probabilities))
    expected = {-1: 0.25, 1: 0.5, 3: 0.25}
    for x, p in probabilities.items():
        assert abs(p - expected.get(x, 0.0)) < 1e-12

    rho = coin_density(state)
    assert abs(rho.a - 0.5) < 1e-12
    assert abs(rho.c - 0.5) < 1e-12
    assert abs(rho.b - 0.25) < 1e-12
    assert abs(position_variance(dist) - 2.0) < 1e-12


def test_step_preserves_norm_and_input():
    rng = np.random.default_rng(5)
    up = rng.normal(size=9) + 1j * rng.normal(size=9)
    down = rng.normal(size=9) + 1j * rng.normal(size=9)
    norm = math.sqrt(np.sum(np.abs(up) ** 2 + np.abs(down) ** 2))
    state = WalkerState(-4, up / norm, down / norm)
    before = state.copy()
    for delta in (1, 2, 7):
        out = step(state, coin_general(0.4, 1.1, -0.3), delta)
        assert abs(out.norm() - 1) < 1e-12
        assert len(out) == len(state) + 2 * delta
        assert out.offset == state.offset - delta
    np.testing.assert_array_equal(state.up, before.up)


def test_step_rejects_non_positive_delta():
    with pytest.raises(DomainError):
        step(make_localized_state([1, 0]), coin_hadamard(), 0)


@pytest.mark.parametrize("coin", [coin_hadamard(), coin_kempe(math.pi / 6), coin_general(0.9, 0.4, 1.7)])
def test_unit_steps_match_textbook_walk(coin):
    config = WalkConfig(coin, 0.5, InitialStateSpec(CoinBlochParams(1.1, 0.7)), total_steps=50)
    spinor = config.initial_state.build().amplitude_at(0)
    for t, (delta, state) in enumerate(evolve(config)):
        if t == 0:
            continue
        assert delta == 1
        oracle = _textbook_walk(coin.matrix, spinor, t)
        for x in range(-t, t + 1):
            up, down = oracle.get(x, (0j, 0j))
            got_up, got_down = state.amplitude_at(x)
            assert abs(got_up - up) < 1e-12
            assert abs(got_down - down) < 1e-12


def test_norm_holds_over_long_random_run():
    config = _config("inf", steps=1000, observables={Observable.ENTROPY})
    worst = 0.0
    for t, (delta, state) in enumerate(evolve(config, run_index=2)):
        worst = max(worst, abs(state.norm() - 1))
    assert worst < 1e-10


def test_window_covers_occupied_sites():
    config = _config(1.3, steps=100)
    reach = 0
    for delta, state in evolve(config, run_index=1):
        reach += delta
        occupied = state.positions()[np.abs(state.up) ** 2 + np.abs(state.down) ** 2 > 0]
        assert np.max(np.abs(occupied)) <= reach


def test_degenerate_runs_agree():
    config = _config(0.5)
    first, second = run_trajectory(config, 0), run_trajectory(config, 9)
    assert np.all(first.steps == 1)
    for observable in config.observables:
        np.testing.assert_array_equal(first[observable], second[observable])


def test_trajectory_is_pure_function_of_seed():
    config = _config(1.2, keep_final_distribution=True)
    a, b = run_trajectory(config, 3), run_trajectory(config, 3)
    assert a.seed == b.seed == config.base_seed + 3
    np.testing.assert_array_equal(a.steps, b.steps)
    for observable in config.observables:
        np.testing.assert_array_equal(a[observable], b[observable])
    np.testing.assert_array_equal(a.final_distribution.probabilities, b.final_distribution.probabilities)
    assert not np.array_equal(a.steps, run_trajectory(config, 4).steps)


def test_series_layout():
    record = run_trajectory(_config(1.5, steps=30))
    assert record.total_steps == 30
    for observable in Observable:
        assert record[observable].shape == (31,)
    assert math.isnan(record[Observable.TRACE_DISTANCE][0])
    assert np.all(np.isfinite(record[Observable.TRACE_DISTANCE][1:]))
    assert record[Observable.IPR][0] == 1.0
    assert record[Observable.VARIANCE][0] == 0.0
    assert np.all((record[Observable.ENTROPY] >= 0) & (record[Observable.ENTROPY] <= 1))


def test_selected_observables_only():
    record = run_trajectory(_config(1.5, steps=10, observables={"entropy"}))
    assert set(record.series) == {Observable.ENTROPY}


def test_gaussian_initial_state_spec():
    spec = InitialStateSpec(EQUATOR, 50.0)
    built = spec.build()
    direct = make_gaussian_state(GaussianInitParams(50.0), [SQRT_HALF, SQRT_HALF])
    np.testing.assert_allclose(built.up, direct.up)
    assert not spec.localized
    with pytest.raises(DomainError):
        InitialStateSpec(EQUATOR, -1.0)


def test_config_validation():
    with pytest.raises(DomainError):
        _config(0.2)
    with pytest.raises(DomainError):
        _config(1.0, steps=0)
    with pytest.raises(DomainError):
        _config(1.0, ensemble_size=0)
    assert _config("inf").step_q == math.inf
    assert _config(0.5).deterministic
