# elephantwalk/analysis/fitting.py
from typing import NamedTuple, Tuple

import numpy as np
from scipy import stats

from analysis.observables import QuasiStationaryWindow, window_slice
from core.constants import DECAY_FLOOR, MIN_FIT_POINTS
from core.errors import DomainError


class PowerLawFit(NamedTuple):
    """series(t) ~ t^exponent over window = (t_min, t_max), using `points` samples"""
    exponent: float
    stderr: float
    window: Tuple[int, int]
    r_squared: float
    intercept: float = 0.0
    points: int = 0

    def describe(self) -> dict:
        return {
            'exponent': self.exponent,
            'stderr': self.stderr,
            't_min': self.window[0],
            't_max': self.window[1],
            'r_squared': self.r_squared,
            'points': self.points,
        }


def _fit_window(series, window):
    if isinstance(window, QuasiStationaryWindow):
        t_min, t_max = window.bounds(np.asarray(series).size)
        # log t needs t >= 1
        window = (max(t_min, 1), t_max)
    t, values = window_slice(series, window)
    if t.size and t[0] < 1:
        raise DomainError(f"Power-law fit window must start at t >= 1, got t_min = {t[0]}")
    return t, values


def _require_points(t):
    if t.size < MIN_FIT_POINTS:
        raise DomainError(
            f"Power-law fit needs at least {MIN_FIT_POINTS} points, "
            f"window ({t[0] if t.size else '?'}, {t[-1] if t.size else '?'}) has {t.size}")


def _regress(t, values) -> PowerLawFit:
    result = stats.linregress(np.log(t.astype(np.float64)), np.log(values))
    r_squared = float(result.rvalue ** 2) if np.isfinite(result.rvalue) else 0.0
    stderr = float(result.stderr) if np.isfinite(result.stderr) else 0.0
    return PowerLawFit(float(result.slope), stderr, (int(t[0]), int(t[-1])), r_squared,
                       float(result.intercept), int(t.size))


def fit_power_law(series, window=QuasiStationaryWindow()) -> PowerLawFit:
    """Ordinary least squares of log(series) against log(t)"""
    t, values = _fit_window(series, window)
    _require_points(t)
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        bad = int(np.argmax(~(np.isfinite(values) & (values > 0))))
        raise DomainError(
            f"Power-law fit needs strictly positive values; series[{t[bad]}] = {values[bad]}")
    return _regress(t, values)


def fit_decay(series, window=QuasiStationaryWindow(), floor: float = DECAY_FLOOR) -> PowerLawFit:
    """Decay exponent beta of series(t) ~ t^-beta.

    Samples at or below `floor` count as roundoff zeros and are left out; at least
    MIN_FIT_POINTS must remain.
    """
    t, values = _fit_window(series, window)
    if not np.all(np.isfinite(values)):
        bad = int(np.argmax(~np.isfinite(values)))
        raise DomainError(f"Decay fit needs finite values; series[{t[bad]}] = {values[bad]}")
    kept = values > floor
    t, values = t[kept], values[kept]
    _require_points(t)
    fit = _regress(t, values)
    return fit._replace(exponent=-fit.exponent)
