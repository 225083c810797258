# main.py
import argparse
import logging
import sys

from core.coins import CoinKind
from core.constants import ENGINE_VERSION
from core.errors import WalkError
from experiments.results import write_results
from experiments.runners import replay, run_experiment
from experiments.spec import ExperimentKind, parse_config

logger = logging.getLogger("elephantwalk")

EXIT_OK = 0
EXIT_INVALID = 2

# Flags shared by every experiment subcommand; dest names are config keys
_EXPERIMENT_FLAGS = (
    ('--q', dict(help="q grid, e.g. 0.5,1,inf or 0.5:1.9:0.1")),
    ('--theta-grid', dict(help="coin angle grid in degrees")),
    ('--omega-grid', dict(help="Bloch polar angle grid in degrees")),
    ('--beta-grid', dict(help="coin phase grid in degrees (general coin)")),
    ('--sigma2', dict(help="initial position variance grid; 0 is localized")),
    ('--steps', dict(type=int, help="number of time steps T")),
    ('--ensemble', dict(type=int, help="trajectories per grid point")),
    ('--seed', dict(type=int, help="base seed; run i uses seed + i")),
    ('--window-fraction', dict(type=float, help="quasi-stationary window start, fraction of T")),
    ('--coin', dict(choices=[k.value for k in CoinKind])),
    ('--gamma', dict(type=float, help="second coin phase in degrees")),
    ('--phi', dict(help="Bloch azimuth in degrees, or 'orthey'")),
    ('--phase-convention', dict(choices=['half', 'full'])),
    ('--observables', dict(help="series observables, comma separated")),
    ('--truncation-radius', dict(type=int, help="Gaussian cut-off radius in sites")),
    ('--final-distribution', dict(action='store_true', default=None,
                                   help="series: also write the ensemble P_T(x)")),
    ('--workers', dict(type=int, help="worker threads")),
    ('--out', dict(help="output CSV path")),
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elephantwalk",
        description="Generalized elephant quantum walk experiments")
    parser.add_argument('--version', action='version', version=f"%(prog)s {ENGINE_VERSION}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help="debug logging")
    verbosity.add_argument('-q', '--quiet', action='store_true', help="warnings only")
    parser.add_argument('--progress', action='store_true', help="show a progress bar")

    commands = parser.add_subparsers(dest='command', required=True)
    for kind in ExperimentKind:
        sub = commands.add_parser(kind.value, help=f"run the {kind.value} experiment")
        sub.add_argument('--config', help="JSON config file; flags override its keys")
        for flag, options in _EXPERIMENT_FLAGS:
            sub.add_argument(flag, **options)
        sub.set_defaults(kind=kind.value)

    replay_cmd = commands.add_parser('replay', help="re-run an experiment from its sidecar")
    replay_cmd.add_argument('--sidecar', required=True, help="JSON sidecar written next to a result")
    replay_cmd.add_argument('--out', help="write here instead of the recorded path")
    return parser


class ElephantWalkApp:
    def __init__(self, argv=None):
        self.args = build_parser().parse_args(argv)
        self._setup_logging()

    def _setup_logging(self):
        level = logging.INFO
        if self.args.verbose:
            level = logging.DEBUG
        elif self.args.quiet:
            level = logging.WARNING
        logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    def _flags(self) -> dict:
        flags = {key: value for key, value in vars(self.args).items()
                 if key not in ('command', 'config', 'verbose', 'quiet', 'progress')}
        return flags

    def _run_experiment(self):
        spec = parse_config(self.args.config, self._flags())
        logger.info("Base seed %d", spec.seed)
        table = run_experiment(spec, progress=self.args.progress)
        return write_results(table, spec.out)

    def _run_replay(self):
        spec, table = replay(self.args.sidecar, self.args.out, progress=self.args.progress)
        logger.info("Base seed %d", spec.seed)
        return write_results(table, spec.out)

    def run(self) -> int:
        try:
            if self.args.command == 'replay':
                written = self._run_replay()
            else:
                written = self._run_experiment()
        except WalkError as e:
            logger.error("%s", e)
            return EXIT_INVALID
        for name, path in written.items():
            print(f"{name}: {path}")
        return EXIT_OK


def main(argv=None) -> int:
    return ElephantWalkApp(argv).run()


if __name__ == "__main__":
    sys.exit(main())
