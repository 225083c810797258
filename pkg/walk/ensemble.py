# elephantwalk/walk/ensemble.py
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from functools import partial
from threading import Lock
from typing import Callable, Dict, Hashable, List, Optional, Tuple
import logging
import time

import numpy as np
from tqdm import tqdm

from core.constants import DEFAULT_WORKERS
from walk.evolution import Observable, RunRecord, WalkConfig, run_trajectory

logger = logging.getLogger(__name__)


def exact_mean_std(stack: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Column mean and sample std; columns where every run agrees bit-for-bit get std 0"""
    if stack.shape[0] == 1:
        return stack[0].copy(), np.zeros(stack.shape[1:])
    mean = np.mean(stack, axis=0)
    std = np.std(stack, axis=0, ddof=1)
    with np.errstate(invalid='ignore'):
        same = np.all(stack == stack[0], axis=0)
    mean = np.where(same, stack[0], mean)
    std = np.where(same, 0.0, std)
    return mean, std


@dataclass
class EnsembleResult:
    config: WalkConfig
    records: List[RunRecord]
    mean: Dict[Observable, np.ndarray]
    std: Dict[Observable, np.ndarray]

    @classmethod
    def aggregate(cls, config: WalkConfig, records: List[RunRecord]) -> 'EnsembleResult':
        """Order-independent: records are sorted by run index before stacking"""
        records = sorted(records, key=lambda r: r.run_index)
        mean, std = {}, {}
        for observable in config.observables:
            stack = np.vstack([r.series[observable] for r in records])
            mean[observable], std[observable] = exact_mean_std(stack)
        return cls(config, records, mean, std)

    @property
    def size(self) -> int:
        return len(self.records)

    def final_distribution(self) -> Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
        """Positions x with the run mean and std of P_T(x); None when no run kept a snapshot"""
        snapshots = [r.final_distribution for r in self.records]
        if not snapshots or any(s is None for s in snapshots):
            return None
        x_min = min(s.offset for s in snapshots)
        x_max = max(s.offset + s.support_size - 1 for s in snapshots)
        stack = np.zeros((len(snapshots), x_max - x_min + 1))
        for row, snapshot in zip(stack, snapshots):
            start = snapshot.offset - x_min
            row[start:start + snapshot.support_size] = snapshot.probabilities
        mean, std = exact_mean_std(stack)
        return np.arange(x_min, x_max + 1), mean, std


class EnsembleRunner:
    """Thread pool for trajectories; results are keyed so completion order never matters"""

    def __init__(self, max_workers: int = DEFAULT_WORKERS, progress: bool = False):
        self.max_workers = max(1, int(max_workers))
        self.progress = progress
        self.thread_pool = ThreadPoolExecutor(max_workers=self.max_workers)
        self.stats_lock = Lock()

        # Stats tracking
        self.runs_completed = 0
        self.run_times: List[float] = []

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, traceback):
        self.cleanup(cancel_pending=exc_type is not None)

    def get_stats(self) -> dict:
        with self.stats_lock:
            return {
                'runs_completed': self.runs_completed,
                'workers': self.max_workers,
                'avg_run_time': float(np.mean(self.run_times)) if self.run_times else 0.0,
            }

    def _timed(self, job: Callable):
        start_time = time.time()
        result = job()
        with self.stats_lock:
            self.runs_completed += 1
            self.run_times.append(time.time() - start_time)
        return result

    def run_jobs(self, jobs: Dict[Hashable, Callable], description: str = "runs") -> Dict[Hashable, object]:
        """Execute zero-argument jobs and return {key: result}"""
        futures = {self.thread_pool.submit(self._timed, job): key for key, job in jobs.items()}
        results = {}
        try:
            with tqdm(total=len(futures), desc=description, disable=not self.progress, leave=False) as bar:
                for future in as_completed(futures):
                    results[futures[future]] = future.result()
                    bar.update(1)
        except BaseException:
            cancelled = sum(future.cancel() for future in futures)
            logger.warning("Batch %s failed; cancelled %d queued runs", description, cancelled)
            raise
        return results

    def run_reduced(self, configs: Dict[Hashable, WalkConfig], reduce: Optional[Callable] = None,
                    description: str = "trajectories") -> Dict[Hashable, list]:
        """Run every member of several ensembles through one pool.

        `reduce(record)` runs inside the worker; values come back per key in run order.
        A degenerate step law contributes a single run.
        """
        jobs = {}
        for key, config in configs.items():
            size = 1 if config.deterministic else config.ensemble_size
            for run_index in range(size):
                jobs[(key, run_index)] = partial(_reduced_run, config, run_index, reduce)
        results = self.run_jobs(jobs, description)

        grouped: Dict[Hashable, list] = {key: [] for key in configs}
        for job_key in jobs:
            grouped[job_key[0]].append(results[job_key])
        return grouped

    def run_ensembles(self, configs: Dict[Hashable, WalkConfig],
                      description: str = "trajectories") -> Dict[Hashable, EnsembleResult]:
        grouped = self.run_reduced(configs, None, description)
        return {key: EnsembleResult.aggregate(configs[key], records) for key, records in grouped.items()}

    def cleanup(self, cancel_pending: bool = False):
        self.thread_pool.shutdown(wait=True, cancel_futures=cancel_pending)


def _reduced_run(config: WalkConfig, run_index: int, reduce: Optional[Callable]):
    record = run_trajectory(config, run_index)
    return record if reduce is None else reduce(record)


def run_ensemble(config: WalkConfig, runner: Optional[EnsembleRunner] = None,
                 collapse_deterministic: bool = False) -> EnsembleResult:
    """Run `ensemble_size` trajectories with seeds base_seed + i and aggregate them.

    With `collapse_deterministic`, a degenerate step law runs a single trajectory.
    """
    size = 1 if (collapse_deterministic and config.deterministic) else config.ensemble_size
    jobs = {i: (lambda i=i: run_trajectory(config, i)) for i in range(size)}
    if runner is None:
        with EnsembleRunner() as owned:
            results = owned.run_jobs(jobs)
    else:
        results = runner.run_jobs(jobs)
    logger.debug("Ensemble of %d runs finished (q=%s)", size, config.step_q)
    return EnsembleResult.aggregate(config, list(results.values()))
