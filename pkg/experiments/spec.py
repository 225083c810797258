# elephantwalk/experiments/spec.py
"""Experiment specifications: parsing, defaults and conversion to walk configs.

A config file is flat JSON whose keys mirror the CLI flags (`theta_grid` for
`--theta-grid`). Flags override file keys. Grids are lists, comma lists
("0,45,90") or inclusive ranges ("0:90:5"); angles are in degrees.
"""
from dataclasses import asdict, dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union
import json
import logging
import math

from core.coins import CoinKind, build_coin
from core.constants import (
    DEFAULT_ENSEMBLE_SIZE,
    DEFAULT_SEED,
    DEFAULT_STEPS,
    DEFAULT_WINDOW_FRACTION,
    DEFAULT_WORKERS,
    GRID_START_DEG,
    GRID_STEP_DEG,
    GRID_STOP_DEG,
)
from core.errors import ConfigError, WalkError
from core.state import CoinBlochParams, PhaseConvention, orthey_phase
from walk.evolution import InitialStateSpec, Observable, WalkConfig
from walk.sampler import format_q, parse_q

logger = logging.getLogger(__name__)

ORTHEY = "orthey"


class ExperimentKind(Enum):
    ENTROPY_SURFACE = "surface"
    ENTROPY_VS_Q = "entropy-vs-q"
    DIFFUSION_VS_Q = "diffusion-vs-q"
    SERIES = "series"
    TRACE_DISTANCE = "trace-distance"
    STEP_PMF = "pmf"


_FULL_GRID = f"{GRID_START_DEG}:{GRID_STOP_DEG}:{GRID_STEP_DEG}"
_DEFAULT_SERIES_OBSERVABLES = ('entropy', 'coherence', 'ipr', 'variance')


@dataclass(frozen=True)
class ExperimentSpec:
    kind: ExperimentKind
    q: Tuple[float, ...]
    theta_grid: Tuple[float, ...] = (45.0,)
    omega_grid: Tuple[float, ...] = (90.0,)
    beta_grid: Optional[Tuple[float, ...]] = None
    sigma2: Tuple[float, ...] = (0.0,)
    coin: CoinKind = CoinKind.KEMPE
    gamma: float = 0.0
    phi: Union[float, str] = 0.0
    phase_convention: PhaseConvention = PhaseConvention.HALF
    steps: int = DEFAULT_STEPS
    ensemble: int = DEFAULT_ENSEMBLE_SIZE
    seed: int = DEFAULT_SEED
    window_fraction: float = DEFAULT_WINDOW_FRACTION
    observables: Tuple[str, ...] = _DEFAULT_SERIES_OBSERVABLES
    truncation_radius: Optional[int] = None
    final_distribution: bool = False
    workers: int = DEFAULT_WORKERS
    out: str = ""

    @property
    def uses_orthey_phase(self) -> bool:
        return self.phi == ORTHEY

    def bloch_params(self, omega_deg: float) -> CoinBlochParams:
        omega = math.radians(omega_deg)
        if self.uses_orthey_phase:
            # The phase relation fixes the phase the spinor actually carries
            return CoinBlochParams(omega, orthey_phase(omega), PhaseConvention.FULL)
        return CoinBlochParams(omega, math.radians(self.phi), self.phase_convention)

    def walk_config(self, q: float, theta_deg: float, omega_deg: float, sigma2: float,
                    beta_deg: float = 0.0, observables=None) -> WalkConfig:
        coin = build_coin(self.coin, math.radians(theta_deg), math.radians(beta_deg),
                          math.radians(self.gamma))
        initial = InitialStateSpec(self.bloch_params(omega_deg), sigma2, self.truncation_radius)
        return WalkConfig(
            coin=coin,
            step_q=q,
            initial_state=initial,
            total_steps=self.steps,
            base_seed=self.seed,
            ensemble_size=self.ensemble,
            observables=frozenset(observables or (Observable(o) for o in self.observables)),
            keep_final_distribution=self.final_distribution,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Plain JSON-ready dict that parse_config turns back into this spec"""
        data = asdict(self)
        data['kind'] = self.kind.value
        data['coin'] = self.coin.value
        data['phase_convention'] = self.phase_convention.value
        data['q'] = [format_q(q) if math.isinf(q) else q for q in self.q]
        for key, value in data.items():
            if isinstance(value, tuple):
                data[key] = list(value)
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'ExperimentSpec':
        return parse_config(flags=data)


# Value parsers, one per key. Each raises ValueError/TypeError on bad input.

def _number(value) -> float:
    if isinstance(value, bool):
        raise TypeError("expected a number, got a boolean")
    if isinstance(value, str):
        value = value.strip()
    number = float(value)
    if not math.isfinite(number):
        raise ValueError("expected a finite number")
    return number


def _integer(value) -> int:
    if isinstance(value, bool):
        raise TypeError("expected an integer, got a boolean")
    if isinstance(value, float) and not value.is_integer():
        raise ValueError("expected an integer")
    if isinstance(value, str):
        value = value.strip()
    return int(value)


def _expand_range(text: str) -> Tuple[float, ...]:
    start, stop, step = (_number(part) for part in text.split(':'))
    if step <= 0:
        raise ValueError("range step must be positive")
    if stop < start:
        raise ValueError("range stop must not be below its start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + k * step, 12) for k in range(count))


def _grid(value, item=_number) -> Tuple[float, ...]:
    if isinstance(value, str):
        text = value.strip()
        if text.count(':') == 2:
            values = tuple(item(v) for v in _expand_range(text))
        else:
            values = tuple(item(part) for part in text.split(',') if part.strip())
    elif isinstance(value, (list, tuple)):
        values = tuple(item(v) for v in value)
    else:
        values = (item(value),)
    if not values:
        raise ValueError("grid is empty")
    return values


def _q_item(value) -> float:
    try:
        return parse_q(value)
    except WalkError as exc:
        raise ValueError(str(exc))


def _phi(value) -> Union[float, str]:
    if isinstance(value, str) and value.strip().lower() == ORTHEY:
        return ORTHEY
    return _number(value)


def _observables(value) -> Tuple[str, ...]:
    items = value.split(',') if isinstance(value, str) else list(value)
    names = tuple(Observable(str(v).strip().replace('-', '_')).value for v in items if str(v).strip())
    if not names:
        raise ValueError("no observables selected")
    return names


def _optional_int(value) -> Optional[int]:
    return None if value is None else _integer(value)


def _boolean(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ('true', 'yes', '1'):
        return True
    if text in ('false', 'no', '0'):
        return False
    raise ValueError("expected true or false")


_PARSERS = {
    'q': lambda v: _grid(v, _q_item),
    'theta_grid': _grid,
    'omega_grid': _grid,
    'beta_grid': lambda v: None if v is None else _grid(v),
    'sigma2': _grid,
    'coin': lambda v: CoinKind(str(v).strip().lower()),
    'gamma': _number,
    'phi': _phi,
    'phase_convention': lambda v: PhaseConvention(str(v).strip().lower()),
    'steps': _integer,
    'ensemble': _integer,
    'seed': _integer,
    'window_fraction': _number,
    'observables': _observables,
    'truncation_radius': _optional_int,
    'final_distribution': _boolean,
    'workers': _integer,
    'out': str,
}
_META_KEYS = {'kind'}


def _parse_value(key: str, value):
    try:
        return _PARSERS[key](value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(key, f"invalid value ({exc})", value)


def _validate(spec: ExperimentSpec) -> ExperimentSpec:
    def check(key, condition, problem):
        if not condition:
            raise ConfigError(key, problem, getattr(spec, key))

    check('theta_grid', all(0 <= t <= 90 for t in spec.theta_grid), "theta must lie in [0, 90] degrees")
    check('omega_grid', all(0 <= o <= 180 for o in spec.omega_grid), "omega must lie in [0, 180] degrees")
    check('sigma2', all(s >= 0 for s in spec.sigma2), "initial variances must be >= 0")
    check('steps', spec.steps >= 1, "must be a positive integer")
    check('ensemble', spec.ensemble >= 1, "must be a positive integer")
    check('seed', 0 <= spec.seed < 2 ** 63, "must be a non-negative 64-bit integer")
    check('window_fraction', 0 <= spec.window_fraction < 1, "must lie in [0, 1)")
    check('workers', spec.workers >= 1, "must be a positive integer")
    check('final_distribution', not spec.final_distribution or spec.kind is ExperimentKind.SERIES,
          "only the series experiment writes P_T(x)")
    if spec.beta_grid is not None:
        check('beta_grid', spec.coin is CoinKind.GENERAL, "a beta grid needs --coin general")
    if spec.uses_orthey_phase:
        check('phi', all(45 <= o <= 135 for o in spec.omega_grid),
              "the maximal-entanglement phase needs every omega in [45, 135] degrees")
    return spec


def _read_file(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as exc:
        raise ConfigError('config', f"{path} is not valid JSON ({exc.msg} at line {exc.lineno})")
    except OSError as exc:
        raise ConfigError('config', f"cannot read {path} ({exc.strerror})")
    if not isinstance(data, dict):
        raise ConfigError('config', f"{path} must hold a flat JSON object")
    # Sidecars nest the resolved spec under "spec"
    if 'spec' in data and isinstance(data['spec'], dict):
        data = data['spec']
    return data


def parse_config(path: Optional[Union[str, Path]] = None,
                 flags: Optional[Mapping[str, Any]] = None) -> ExperimentSpec:
    """Resolve an ExperimentSpec from an optional config file plus flag overrides.

    Flag values of None mean "not given" and do not override the file.
    """
    raw: Dict[str, Any] = _read_file(path) if path is not None else {}
    for key, value in (flags or {}).items():
        if value is not None:
            raw[key.replace('-', '_')] = value

    unknown = sorted(set(raw) - set(_PARSERS) - _META_KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    if 'kind' not in raw:
        raise ConfigError('kind', "experiment kind is required")
    try:
        kind = ExperimentKind(str(raw['kind']))
    except ValueError:
        raise ConfigError('kind', f"must be one of {', '.join(k.value for k in ExperimentKind)}", raw['kind'])
    if 'q' not in raw:
        raise ConfigError('q', f"a q grid is required for {kind.value}")

    values = {key: _parse_value(key, value) for key, value in raw.items() if key in _PARSERS}
    if kind is ExperimentKind.ENTROPY_SURFACE:
        values.setdefault('theta_grid', _grid(_FULL_GRID))
        # A (theta, beta) surface keeps a single omega
        if values.get('beta_grid') is None:
            values.setdefault('omega_grid', _grid(_FULL_GRID))
    values.setdefault('out', str(Path('results') / f"{kind.value}.csv"))

    spec = _validate(ExperimentSpec(kind=kind, **values))
    logger.debug("Resolved %s spec: %s", kind.value, spec.to_dict())
    return spec


def with_overrides(spec: ExperimentSpec, **changes) -> ExperimentSpec:
    return _validate(replace(spec, **changes))
