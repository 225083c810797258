# elephantwalk/experiments/runners.py
"""One driver per experiment kind. Each turns an ExperimentSpec into a ResultTable."""
from itertools import product
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Tuple, Union
import logging
import math
import time

import numpy as np
import pandas as pd

from analysis.fitting import fit_decay, fit_power_law
from analysis.observables import QuasiStationaryWindow, is_quasi_stationary, time_average
from core.errors import DomainError
from experiments.results import ResultTable, load_sidecar
from experiments.spec import ExperimentKind, ExperimentSpec, with_overrides
from walk.ensemble import EnsembleRunner, exact_mean_std
from walk.evolution import Observable, RunRecord, WalkConfig
from walk.sampler import qexp_pmf

logger = logging.getLogger(__name__)


class GridPoint(NamedTuple):
    q: float
    theta_deg: float
    omega_deg: float
    beta_deg: float
    sigma2: float

    def config(self, spec: ExperimentSpec, observables) -> WalkConfig:
        return spec.walk_config(self.q, self.theta_deg, self.omega_deg, self.sigma2,
                                self.beta_deg, observables)

    def columns(self) -> dict:
        return self._asdict()


def _grid_points(spec: ExperimentSpec, q_outer: bool = True) -> List[GridPoint]:
    betas = spec.beta_grid or (0.0,)
    if q_outer:
        combos = product(spec.q, spec.sigma2, spec.theta_grid, spec.omega_grid, betas)
        return [GridPoint(q, t, o, b, s) for q, s, t, o, b in combos]
    combos = product(spec.theta_grid, spec.omega_grid, betas, spec.q, spec.sigma2)
    return [GridPoint(q, t, o, b, s) for t, o, b, q, s in combos]


def _scalar_stats(values) -> Tuple[float, float]:
    mean, std = exact_mean_std(np.asarray(values, dtype=np.float64).reshape(-1, 1))
    return float(mean[0]), float(std[0])


def _entropy_table(spec: ExperimentSpec, runner: EnsembleRunner, q_outer: bool) -> pd.DataFrame:
    window = QuasiStationaryWindow(spec.window_fraction)

    def reduce(record: RunRecord):
        series = record[Observable.ENTROPY]
        mean, std = time_average(series, window)
        return mean, std, is_quasi_stationary(series, window)

    points = _grid_points(spec, q_outer)
    configs = {point: point.config(spec, {Observable.ENTROPY}) for point in points}
    reduced = runner.run_reduced(configs, reduce, description=spec.kind.value)

    rows = []
    for point in points:
        runs = reduced[point]
        mean, std = _scalar_stats([r[0] for r in runs])
        rows.append({
            **point.columns(),
            'entropy_mean': mean,
            'entropy_std': std,
            'entropy_time_std': float(np.mean([r[1] for r in runs])),
            'stationary_fraction': float(np.mean([r[2] for r in runs])),
            'runs': len(runs),
        })
    return pd.DataFrame(rows)


def _surface_frame(spec: ExperimentSpec, runner: EnsembleRunner) -> pd.DataFrame:
    """Time-averaged coin entropy over the (theta, omega) or (theta, beta) plane"""
    frame = _entropy_table(spec, runner, q_outer=False)
    plane = 'theta-beta' if spec.beta_grid is not None else 'theta-omega'
    logger.info("Entropy surface over the %s plane: %d points", plane, len(frame))
    return frame


def _entropy_vs_q_frame(spec: ExperimentSpec, runner: EnsembleRunner) -> pd.DataFrame:
    return _entropy_table(spec, runner, q_outer=True)


def _diffusion_frame(spec: ExperimentSpec, runner: EnsembleRunner) -> pd.DataFrame:
    """Diffusion exponent alpha of Var(t) ~ t^alpha, fitted per run then averaged"""
    window = QuasiStationaryWindow(spec.window_fraction)

    def reduce(record: RunRecord) -> float:
        return fit_power_law(record[Observable.VARIANCE], window).exponent

    points = _grid_points(spec)
    configs = {point: point.config(spec, {Observable.VARIANCE}) for point in points}
    reduced = runner.run_reduced(configs, reduce, description=spec.kind.value)

    rows = []
    for point in points:
        mean, std = _scalar_stats(reduced[point])
        rows.append({**point.columns(), 'alpha_mean': mean, 'alpha_std': std,
                     'runs': len(reduced[point])})
    return pd.DataFrame(rows)


def _series_frame(spec: ExperimentSpec, runner: EnsembleRunner, observables,
                  first_step: int = 0) -> Tuple[List[GridPoint], Dict, pd.DataFrame]:
    points = _grid_points(spec)
    configs = {point: point.config(spec, observables) for point in points}
    results = runner.run_ensembles(configs, description=spec.kind.value)

    frames = []
    t = np.arange(first_step, spec.steps + 1)
    for curve, point in enumerate(points):
        result = results[point]
        columns = {'curve': curve, **point.columns(), 't': t}
        for observable in sorted(observables, key=lambda o: o.value):
            columns[f"{observable.value}_mean"] = result.mean[observable][first_step:]
            columns[f"{observable.value}_std"] = result.std[observable][first_step:]
        columns['runs'] = result.size
        frames.append(pd.DataFrame(columns))
    return points, results, pd.concat(frames, ignore_index=True)


def _distribution_frame(points: List[GridPoint], results: Dict) -> pd.DataFrame:
    frames = []
    for curve, point in enumerate(points):
        x, mean, std = results[point].final_distribution()
        frames.append(pd.DataFrame({'curve': curve, **point.columns(), 'x': x,
                                    'probability_mean': mean, 'probability_std': std}))
    return pd.concat(frames, ignore_index=True)


def _series_only_frame(spec: ExperimentSpec, runner: EnsembleRunner) -> Union[pd.DataFrame, Tuple]:
    """Ensemble mean and std of the selected observables at every t, one curve per grid point.

    With `final_distribution` set, a `distribution` companion holds P_T(x) per curve.
    """
    observables = {Observable(o) for o in spec.observables}
    points, results, frame = _series_frame(spec, runner, observables)
    if not spec.final_distribution:
        return frame
    return frame, {'distribution': _distribution_frame(points, results)}


def _sigma_label(sigma2: float) -> str:
    return f"{sigma2:g}"


def _trace_distance_frames(spec: ExperimentSpec, runner: EnsembleRunner) -> Tuple[pd.DataFrame, Dict[str, pd.DataFrame]]:
    """Successive-state trace distance series plus a table of fitted decay exponents"""
    points, results, frame = _series_frame(spec, runner, {Observable.TRACE_DISTANCE}, first_step=1)
    window = QuasiStationaryWindow(spec.window_fraction)

    fits: Dict[Tuple, dict] = {}
    for point in points:
        key = (point.q, point.theta_deg, point.omega_deg, point.beta_deg)
        row = fits.setdefault(key, {'q': point.q, 'theta_deg': point.theta_deg,
                                    'omega_deg': point.omega_deg, 'beta_deg': point.beta_deg})
        label = _sigma_label(point.sigma2)
        try:
            fit = fit_decay(results[point].mean[Observable.TRACE_DISTANCE], window)
            row[f"beta_s2_{label}"], row[f"beta_err_s2_{label}"] = fit.exponent, fit.stderr
            row[f"points_s2_{label}"] = fit.points
        except DomainError as e:
            logger.warning("No decay fit for q=%s, sigma2=%s: %s", point.q, point.sigma2, e)
            row[f"beta_s2_{label}"], row[f"beta_err_s2_{label}"] = math.nan, math.nan
            row[f"points_s2_{label}"] = 0
    return frame, {'fits': pd.DataFrame(list(fits.values()))}


def _step_pmf_frame(spec: ExperimentSpec, runner: EnsembleRunner = None) -> pd.DataFrame:
    """Step-length law at time t = steps for every q in the grid"""
    t = spec.steps
    frames = []
    for q in spec.q:
        dist = qexp_pmf(q, t)
        frames.append(pd.DataFrame({
            'q': q,
            't': t,
            'delta': dist.support,
            'probability': dist.probabilities,
        }))
    return pd.concat(frames, ignore_index=True)


def _tabulate(spec: ExperimentSpec, build, runner: Optional[EnsembleRunner] = None,
              progress: bool = False) -> ResultTable:
    logger.info("Running %s: q=%s, steps=%d, ensemble=%d, seed=%d",
                spec.kind.value, list(spec.q), spec.steps, spec.ensemble, spec.seed)
    start_time = time.time()

    owned = runner is None
    if owned:
        runner = EnsembleRunner(spec.workers, progress)
    try:
        output = build(spec, runner)
        stats = runner.get_stats()
    except BaseException:
        if owned:
            runner.cleanup(cancel_pending=True)
        raise
    if owned:
        runner.cleanup()

    frame, companions = output if isinstance(output, tuple) else (output, {})
    elapsed = time.time() - start_time
    logger.info("%s finished in %.1fs (%d trajectories, %.3fs each)", spec.kind.value, elapsed,
                stats['runs_completed'], stats['avg_run_time'])
    return ResultTable.build(spec, frame, elapsed, companions)


def exp_entropy_surface(spec: ExperimentSpec, runner: Optional[EnsembleRunner] = None) -> ResultTable:
    return _tabulate(spec, _surface_frame, runner)


def exp_entropy_vs_q(spec: ExperimentSpec, runner: Optional[EnsembleRunner] = None) -> ResultTable:
    return _tabulate(spec, _entropy_vs_q_frame, runner)


def exp_diffusion_vs_q(spec: ExperimentSpec, runner: Optional[EnsembleRunner] = None) -> ResultTable:
    return _tabulate(spec, _diffusion_frame, runner)


def exp_series(spec: ExperimentSpec, runner: Optional[EnsembleRunner] = None) -> ResultTable:
    return _tabulate(spec, _series_only_frame, runner)


def exp_trace_distance(spec: ExperimentSpec, runner: Optional[EnsembleRunner] = None) -> ResultTable:
    """Series table plus a `fits` companion of decay exponents per q and sigma2"""
    return _tabulate(spec, _trace_distance_frames, runner)


def exp_step_pmf(spec: ExperimentSpec, runner: Optional[EnsembleRunner] = None) -> ResultTable:
    return _tabulate(spec, _step_pmf_frame, runner)


_FRAME_BUILDERS = {
    ExperimentKind.ENTROPY_SURFACE: _surface_frame,
    ExperimentKind.ENTROPY_VS_Q: _entropy_vs_q_frame,
    ExperimentKind.DIFFUSION_VS_Q: _diffusion_frame,
    ExperimentKind.SERIES: _series_only_frame,
    ExperimentKind.TRACE_DISTANCE: _trace_distance_frames,
    ExperimentKind.STEP_PMF: _step_pmf_frame,
}


def run_experiment(spec: ExperimentSpec, progress: bool = False,
                   runner: Optional[EnsembleRunner] = None) -> ResultTable:
    return _tabulate(spec, _FRAME_BUILDERS[spec.kind], runner, progress)


def replay(sidecar: Union[str, Path], out: Optional[str] = None,
           progress: bool = False) -> Tuple[ExperimentSpec, ResultTable]:
    """Re-run the experiment recorded in a sidecar, optionally writing somewhere else"""
    spec = load_sidecar(sidecar)
    if out is not None:
        spec = with_overrides(spec, out=str(out))
    logger.info("Replaying %s from %s", spec.kind.value, sidecar)
    return spec, run_experiment(spec, progress)
