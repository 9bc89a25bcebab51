from typing import Callable, Optional, Sequence
import argparse
import logging
import sys

from typing_extensions import Final

from .config import load_config
from .constants import LOGGER_NAME
from .exceptions import BayesTrialsError, ConfigError
from .report import FORMATS, SUBCOMMANDS, emit, run

__all__ = ('calibrate', 'dose_find', 'get_common_parser', 'main', 'oc',
           'parse_common_args', 'report', 'simulate')

EXIT_CONFIG: Final[int] = 1
EXIT_COMPUTATION: Final[int] = 2
EXIT_IO: Final[int] = 3

_DESCRIPTIONS = {
    'simulate': 'Simulate operating characteristics by Monte Carlo',
    'oc': 'Compute operating characteristics, exactly where feasible',
    'calibrate': 'Calibrate the success cutoff to a Type I error target',
    'dose-find': 'Tabulate and simulate a dose-escalation design',
    'report': 'Run every applicable analysis and write a full report',
}


def get_common_parser(
        description: Optional[str] = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument('-c',
                        '--config',
                        required=True,
                        help='JSON run configuration')
    parser.add_argument('-s',
                        '--seed',
                        type=int,
                        help='Master seed (overrides the configuration)')
    parser.add_argument('-o',
                        '--out',
                        default='.',
                        help='Output directory')
    parser.add_argument('-f',
                        '--format',
                        choices=FORMATS,
                        default='json',
                        help='Report format')
    parser.add_argument('-w',
                        '--workers',
                        type=int,
                        help='Worker processes for simulation')
    parser.add_argument('--timestamp',
                        help='ISO 8601 timestamp recorded in the manifest')
    parser.add_argument('-d',
                        '--debug',
                        action='store_true',
                        help='Log and raise exceptions')
    return parser


def parse_common_args(args: argparse.Namespace) -> None:
    if args.debug:
        channel = logging.StreamHandler()
        channel.setLevel(logging.DEBUG)
        channel.setFormatter(
            logging.Formatter('%(asctime)s - %(name)s - '
                              '%(levelname)s - %(message)s'))
        log = logging.getLogger(LOGGER_NAME)
        log.setLevel(logging.DEBUG)
        log.addHandler(channel)
    if args.workers is not None and args.workers < 1:
        raise SystemExit('--workers must be at least 1')


def _execute(subcommand: str, args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config)
        result = run(config,
                     subcommand,
                     seed=args.seed,
                     workers=args.workers,
                     timestamp=args.timestamp)
        for path in emit(result, args.format, args.out):
            print(path)
    except ConfigError as e:
        if args.debug:
            raise e
        print(str(e), file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        if args.debug:
            raise e
        print(str(e), file=sys.stderr)
        return EXIT_IO
    except BayesTrialsError as e:
        if args.debug:
            raise e
        print(str(e), file=sys.stderr)
        return EXIT_COMPUTATION
    return 0


def _subcommand(name: str) -> Callable[..., int]:
    def f(argv: Optional[Sequence[str]] = None) -> int:
        parser = get_common_parser(_DESCRIPTIONS[name])
        args = parser.parse_args(argv)
        parse_common_args(args)
        return _execute(name, args)

    return f


simulate = _subcommand('simulate')
oc = _subcommand('oc')
calibrate = _subcommand('calibrate')
dose_find = _subcommand('dose-find')
report = _subcommand('report')


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = get_common_parser('Bayesian clinical trial design and '
                               'operating characteristics')
    parser.add_argument('subcommand', choices=SUBCOMMANDS)
    args = parser.parse_args(argv)
    parse_common_args(args)
    return _execute(args.subcommand, args)
