from functools import partial
import math
import time

import numpy as np
import pytest

from core.coins import coin_kempe
from core.state import CoinBlochParams
from walk.ensemble import EnsembleResult, EnsembleRunner, exact_mean_std, run_ensemble
from walk.evolution import InitialStateSpec, Observable, WalkConfig, run_trajectory


def _config(q, ensemble_size=6, steps=40, **options):
    return WalkConfig(coin_kempe(math.pi / 4), q, InitialStateSpec(CoinBlochParams(math.pi / 2, 0.0)),
                      total_steps=steps, ensemble_size=ensemble_size, **options)


def test_exact_mean_std():
    stack = np.array([[1.0, 2.0, np.nan], [1.0, 4.0, np.nan]])
    mean, std = exact_mean_std(stack)
    np.testing.assert_array_equal(mean[:2], [1.0, 3.0])
    assert std[0] == 0.0
    assert std[1] == pytest.approx(math.sqrt(2))
    assert math.isnan(mean[2])

    mean, std = exact_mean_std(np.array([[0.1, 0.2]]))
    np.testing.assert_array_equal(std, [0.0, 0.0])


def test_degenerate_ensemble_has_zero_spread():
    result = run_ensemble(_config(0.5))
    assert result.size == 6
    for observable in (Observable.ENTROPY, Observable.VARIANCE, Observable.IPR):
        assert np.all(result.std[observable] == 0.0)
    collapsed = run_ensemble(_config(0.5), collapse_deterministic=True)
    assert collapsed.size == 1
    np.testing.assert_array_equal(collapsed.mean[Observable.ENTROPY], result.mean[Observable.ENTROPY])


def test_mean_independent_of_worker_count():
    config = _config(1.4)
    with EnsembleRunner(max_workers=1) as serial:
        first = run_ensemble(config, serial)
    with EnsembleRunner(max_workers=4) as pooled:
        second = run_ensemble(config, pooled)
    for observable in config.observables:
        np.testing.assert_array_equal(first.mean[observable], second.mean[observable])
        np.testing.assert_array_equal(first.std[observable], second.std[observable])
    assert [r.run_index for r in second.records] == list(range(6))


def test_aggregate_ignores_record_order():
    config = _config(1.4, ensemble_size=4)
    records = [run_trajectory(config, i) for i in range(4)]
    forward = EnsembleResult.aggregate(config, records)
    backward = EnsembleResult.aggregate(config, records[::-1])
    np.testing.assert_array_equal(forward.mean[Observable.ENTROPY], backward.mean[Observable.ENTROPY])


def test_ensemble_mean_matches_manual_average():
    config = _config(2.0, ensemble_size=3)
    result = run_ensemble(config)
    manual = np.mean([run_trajectory(config, i)[Observable.VARIANCE] for i in range(3)], axis=0)
    np.testing.assert_allclose(result.mean[Observable.VARIANCE], manual, rtol=1e-14)


def test_run_reduced_groups_in_run_order():
    configs = {'a': _config(1.4, ensemble_size=3), 'b': _config(0.5, ensemble_size=3)}
    with EnsembleRunner(max_workers=3) as runner:
        grouped = runner.run_reduced(configs, lambda record: record.run_index)
        stats = runner.get_stats()
    assert grouped == {'a': [0, 1, 2], 'b': [0]}
    assert stats['runs_completed'] == 4
    assert stats['workers'] == 3


def test_run_ensembles_collapses_degenerate_laws():
    configs = {0.5: _config(0.5), 1.4: _config(1.4)}
    with EnsembleRunner() as runner:
        results = runner.run_ensembles(configs)
    assert results[0.5].size == 1
    assert results[1.4].size == 6


def test_final_distribution_aligns_run_windows():
    result = run_ensemble(_config(1.8, ensemble_size=4, keep_final_distribution=True))
    x, mean, std = result.final_distribution()
    assert x.size == mean.size == std.size
    assert mean.sum() == pytest.approx(1.0, abs=1e-10)
    for record in result.records:
        snapshot = record.final_distribution
        assert x[0] <= snapshot.offset
        assert snapshot.offset + snapshot.support_size - 1 <= x[-1]
    assert run_ensemble(_config(1.8, ensemble_size=2)).final_distribution() is None


def test_failed_job_cancels_queued_runs():
    started = []

    def failing():
        raise RuntimeError("run failed")

    def slow(index):
        started.append(index)
        time.sleep(0.01)
        return index

    jobs = {0: failing, **{i: partial(slow, i) for i in range(1, 200)}}
    runner = EnsembleRunner(max_workers=1)
    with pytest.raises(RuntimeError, match="run failed"):
        runner.run_jobs(jobs)
    runner.cleanup()
    assert len(started) < 20
