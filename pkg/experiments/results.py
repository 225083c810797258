# elephantwalk/experiments/results.py
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Union
import json
import logging

import pandas as pd

from core.constants import ENGINE_VERSION
from core.errors import ConfigError
from experiments.spec import ExperimentSpec, parse_config

logger = logging.getLogger(__name__)

# repr-exact floats so replays compare bit for bit
FLOAT_FORMAT = "%.17g"


@dataclass
class ResultTable:
    frame: pd.DataFrame
    metadata: Dict[str, Any]
    companions: Dict[str, pd.DataFrame] = field(default_factory=dict)

    @classmethod
    def build(cls, spec: ExperimentSpec, frame: pd.DataFrame, wall_clock: float,
              companions: Dict[str, pd.DataFrame] = None) -> 'ResultTable':
        metadata = {
            'spec': spec.to_dict(),
            'seed': spec.seed,
            'engine_version': ENGINE_VERSION,
            'wall_clock_seconds': wall_clock,
            'created_at': datetime.now(timezone.utc).isoformat(timespec='seconds'),
            'rows': int(len(frame)),
            'columns': list(frame.columns),
        }
        return cls(frame.reset_index(drop=True), metadata, dict(companions or {}))

    @property
    def columns(self):
        return list(self.frame.columns)


def sidecar_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_suffix('.json')


def companion_path(path: Union[str, Path], name: str) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}_{name}.csv")


def write_results(table: ResultTable, path: Union[str, Path]) -> Dict[str, Path]:
    """Write the data CSV, its companions and the JSON sidecar; returns what was written"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    written = {'data': path}
    table.frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, encoding='utf-8')
    for name, frame in table.companions.items():
        target = companion_path(path, name)
        frame.to_csv(target, index=False, float_format=FLOAT_FORMAT, encoding='utf-8')
        written[name] = target

    metadata = dict(table.metadata)
    metadata['companions'] = sorted(table.companions)
    sidecar = sidecar_path(path)
    sidecar.write_text(json.dumps(metadata, indent=2, sort_keys=True), encoding='utf-8')
    written['sidecar'] = sidecar

    logger.info("Wrote %d rows to %s (sidecar %s)", len(table.frame), path, sidecar)
    return written


def read_results(path: Union[str, Path]) -> pd.DataFrame:
    """Read a result CSV back; round_trip parsing restores every %.17g value exactly"""
    return pd.read_csv(path, encoding='utf-8', float_precision='round_trip')


def load_sidecar(path: Union[str, Path]) -> ExperimentSpec:
    """Resolved spec recorded next to a result file"""
    path = Path(path)
    if path.suffix != '.json':
        path = sidecar_path(path)
    if not path.exists():
        raise ConfigError('sidecar', f"{path} does not exist")
    return parse_config(path)
