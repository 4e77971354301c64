"""
Command line front end: `vif {solve, kernels, dynamics, sweep, validate-config} --config spec.yaml --out dir`

Exit codes: 0 success, 2 configuration error, 3 numeric or stage error, 4 I/O error
"""
import logging
import sys
from argparse import ArgumentParser
# VIF imports
from VIF import __version__
from VIF.RunManager import RunManager
from VIF.errors import VIFError

logger = logging.getLogger(__name__)

STAGES = ('solve', 'kernels', 'dynamics', 'sweep')
LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def parse_args(argv=None):
    """ Parse command line arguments """
    common = ArgumentParser(add_help=False)
    common.add_argument('--config', required=True, metavar='YAML', help='run spec file')
    common.add_argument('--out', default=None, metavar='DIR',
                        help='output directory (default: outputs.directory of the config)')
    common.add_argument('--threads', type=int, default=None, metavar='N',
                        help='worker processes for ensemble sweeps (default: outputs.threads of the config)')
    common.add_argument('--seed-override', type=int, default=None, metavar='U64',
                        help='replace disorder.seed of the config (not allowed with disorder.seeds)')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='log at DEBUG level')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='log warnings and errors only')

    parser = ArgumentParser(prog='vif', description='Vortex influence-functional kernels from BdG solutions')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', required=True)
    for stage in STAGES:
        subparsers.add_parser(stage, parents=[common], help=f'run the {stage} stage')
    subparsers.add_parser('validate-config', parents=[common], help='validate a config and print its hash')
    return parser.parse_args(argv)


def configure_logging(verbose: bool = False, quiet: bool = False):
    level = logging.DEBUG if verbose else (logging.WARNING if quiet else logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def main(argv=None) -> int:
    args = parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        manager = RunManager.from_spec_file(args.config, out_dir=args.out, threads=args.threads,
                                            seed_override=args.seed_override)
        if args.command == 'validate-config':
            print(manager.config.config_hash())
            return 0
        manager.run_flow(args.command)
    except VIFError as exc:
        logger.error(f'{args.command} failed: {exc}')
        diagnostics = getattr(exc, 'diagnostics', None)
        if diagnostics:
            logger.error(f'diagnostics: {diagnostics}')
        return exc.exit_code
    except OSError as exc:
        logger.error(f'{args.command} failed: {exc}')
        return 4
    return 0


if __name__ == '__main__':
    sys.exit(main())
