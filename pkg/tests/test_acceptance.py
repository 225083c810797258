"""Desk-scale reproductions of the published benchmarks.

Only the standard-walk entropy check runs by default; the rest need --runslow.
"""
import math
import time

import numpy as np
import pytest

from core.coins import coin_hadamard
from core.state import CoinBlochParams
from experiments.runners import exp_diffusion_vs_q, exp_entropy_surface, exp_entropy_vs_q, exp_trace_distance
from experiments.spec import parse_config
from walk.evolution import InitialStateSpec, Observable, WalkConfig, run_trajectory


def test_standard_walk_asymptotic_entropy():
    # (|up> + i|down>)/sqrt(2) is omega = pi/2 with relative phase pi/2
    config = WalkConfig(coin_hadamard(), 0.5, InitialStateSpec(CoinBlochParams(math.pi / 2, math.pi)),
                        total_steps=2000, observables={Observable.ENTROPY})
    start = time.time()
    record = run_trajectory(config)
    assert time.time() - start < 5
    assert record[Observable.ENTROPY][-1] == pytest.approx(0.872, abs=0.005)


@pytest.mark.slow
@pytest.mark.parametrize("theta, q, expected, tolerance", [
    (45, 0.5, 0.8724, 0.003),
    (45, 0.6, 0.9852, 0.01),
    (30, 0.5, 0.9183, 0.005),
    (30, 0.6, 0.9878, 0.01),
    (45, 1.0, 0.99, 0.01),
])
def test_time_averaged_entropy(theta, q, expected, tolerance):
    spec = parse_config(flags={'kind': 'entropy-vs-q', 'q': q, 'theta_grid': theta, 'workers': 4})
    row = exp_entropy_vs_q(spec).frame.iloc[0]
    assert row.entropy_mean == pytest.approx(expected, abs=tolerance)
    if q == 0.5:
        assert row.entropy_std == 0.0


@pytest.mark.slow
def test_diffusion_exponents():
    spec = parse_config(flags={'kind': 'diffusion-vs-q', 'q': '0.5,inf', 'workers': 4})
    frame = exp_diffusion_vs_q(spec).frame.set_index('q')
    assert frame.alpha_mean[0.5] == pytest.approx(2.0, abs=0.05)
    assert frame.alpha_mean[math.inf] == pytest.approx(2.98, abs=0.10)


@pytest.mark.slow
def test_trace_distance_decay_exponents():
    spec = parse_config(flags={'kind': 'trace-distance', 'q': '0.5,1,inf', 'sigma2': '0,100',
                               'steps': 2000, 'window_fraction': 0.1, 'workers': 4})
    fits = exp_trace_distance(spec).companions['fits'].set_index('q')
    assert 1.40 <= fits.beta_s2_0[0.5] <= 1.55
    assert fits.beta_s2_0[1.0] == pytest.approx(0.25, abs=0.05)
    assert fits.beta_s2_0[math.inf] == pytest.approx(0.7, abs=0.15)
    assert fits.beta_s2_100[math.inf] == pytest.approx(0.37, abs=0.15)


@pytest.mark.slow
def test_delocalized_maximal_entanglement():
    spec = parse_config(flags={'kind': 'series', 'q': 0.5, 'coin': 'hadamard', 'omega_grid': 60,
                               'phi': 'orthey', 'steps': 2000, 'observables': 'entropy'})
    wide = run_trajectory(spec.walk_config(0.5, 45, 60, 1e3))
    assert wide[Observable.ENTROPY][-1] >= 0.99
    localized = run_trajectory(spec.walk_config(0.5, 45, 60, 0.0))
    assert np.mean(localized[Observable.ENTROPY][1000:]) < 0.99


@pytest.mark.slow
def test_entropy_plateau_for_uniform_steps():
    spec = parse_config(flags={'kind': 'surface', 'q': 'inf', 'steps': 500, 'ensemble': 20, 'workers': 4})
    frame = exp_entropy_surface(spec).frame
    assert len(frame) == 19 * 19
    assert np.mean(frame.entropy_mean > 0.95) >= 0.9


@pytest.mark.slow
def test_wide_standard_walk_is_weakly_entangled():
    spec = parse_config(flags={'kind': 'surface', 'q': 0.5, 'sigma2': 1e3,
                               'theta_grid': 45, 'omega_grid': 90})
    frame = exp_entropy_surface(spec).frame
    assert frame.entropy_mean.iloc[0] < 0.5
