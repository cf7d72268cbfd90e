#!/usr/bin/env python3
"""
spinlab - NMR spin-dynamics laboratory

Main entry point for the modular command system.
"""

import argparse
import logging
import sys

# Python version check
if sys.version_info < (3, 11):
    print("ERROR: Python 3.11+ required")
    print(f"Current version: {sys.version}")
    print("Please upgrade Python and try again.")
    sys.exit(1)

# Import core utilities
from src.core.core import setup_logging
from src.core.errors import SpinlabError

# Import command functions
from src.dd.command         import cmd_dd
from src.lgi.command        import cmd_lgi
from src.perf.command       import cmd_perf
from src.pps.command        import cmd_pps
from src.singlet.command    import cmd_singlet
from src.tomography.command import cmd_tomo
from src.validate.command   import cmd_validate


def _scenario_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--scenario', help='TOML scenario file (CLI flags override it)')
    parser.add_argument('--system', help='Spin-system JSON file or shipped system name')
    parser.add_argument('--output', help='Output directory (default: out/<command>)')
    parser.add_argument('--seed', type=int, help='Random seed for stochastic steps')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='spinlab', description='NMR spin-dynamics laboratory')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='Increase verbosity (-v INFO, -vv DEBUG)')

    subparsers = parser.add_subparsers(dest='command', help='Command')

    singlet_parser = subparsers.add_parser('singlet', help='Singlet-order decay under spin-lock')
    _scenario_flags(singlet_parser)
    singlet_parser.add_argument('--t-max-s', type=float, help='Longest lock time in seconds (default: 60)')
    singlet_parser.add_argument('--steps', type=int, help='Number of lock times (default: 61)')
    singlet_parser.add_argument('--no-echo', dest='echo', action='store_false', default=None,
                                help='Prepare without the J-evolution echo')

    tomo_parser = subparsers.add_parser('tomo', help='Density-matrix tomography round trip')
    _scenario_flags(tomo_parser)
    tomo_parser.add_argument('--scheme', choices=['2spin', '3spin', 'diagonal'], help='Experiment set (default: 2spin)')
    tomo_parser.add_argument('--state', help='random, thermal, singlet or pps:<bits> (default: random)')
    tomo_parser.add_argument('--noise', type=float, help='Readout noise standard deviation (default: 0)')
    tomo_parser.add_argument('--readout', choices=['spin', 'transition'], help='Readout model (default: spin)')
    tomo_parser.add_argument('--qubits', type=int, help='Register size for the diagonal scheme (default: 4)')

    pps_parser = subparsers.add_parser('pps', help='Pseudopure-state preparation through singlets')
    _scenario_flags(pps_parser)
    pps_parser.add_argument('--qubits', type=int, help='Register size (default: 2)')
    mode = pps_parser.add_mutually_exclusive_group()
    mode.add_argument('--ideal', dest='mode', action='store_const', const='ideal',
                      help='Ideal branch accounting (default)')
    mode.add_argument('--relaxed', dest='mode', action='store_const', const='finite',
                      help='Finite relaxation constants of the spin system')
    pps_parser.add_argument('--refocus', action='store_true', default=None,
                            help='Refocus the first pair (lands on |10..>)')
    pps_parser.add_argument('--lock-s', type=float, help='Spin-lock duration in seconds (default: 12.4)')
    pps_parser.add_argument('--demo', choices=['temporal', 'logical'],
                            help='Run a population-permutation demo instead')

    dd_parser = subparsers.add_parser('dd', help='Bell-state storage under dynamical decoupling')
    _scenario_flags(dd_parser)
    dd_parser.add_argument('--scheme', choices=['none', 'cpmg', 'udd'], help='Decoupling scheme (default: udd)')
    dd_parser.add_argument('--order', type=int, help='Pulses per block (default: 7)')
    dd_parser.add_argument('--bell', help='psi-plus, psi-minus, phi-plus or phi-minus (default: psi-plus)')
    dd_parser.add_argument('--spectrum', help='Noise spectrum, e.g. ohmic:amp=1e-4,cutoff=900,exponent=0')
    dd_parser.add_argument('--t-max-s', type=float, help='Longest storage time in seconds (default: 30)')
    dd_parser.add_argument('--steps', type=int, help='Number of sampled times (default: 121)')
    dd_parser.add_argument('--relax', action='store_true', default=None, help='Free relaxation between flips')
    dd_parser.add_argument('--rf-error', type=float, help='Relative flip-angle error (default: 0)')
    dd_parser.add_argument('--collective', action='store_true', default=None,
                           help='Identical noise on both spins')
    dd_parser.add_argument('--trajectories', type=int, help='Monte-Carlo trajectories (0 disables)')
    dd_parser.add_argument('--mc-blocks', type=int, help='Blocks sampled by the Monte-Carlo run (default: 10)')
    dd_parser.add_argument('--optimize', action='store_true', default=None,
                           help='Also scan odd UDD orders for the optimum')

    lgi_parser = subparsers.add_parser('lgi', help='Leggett-Garg string sweep')
    _scenario_flags(lgi_parser)
    lgi_parser.add_argument('--n', type=int, help='Number of measurement times (default: 3)')
    lgi_parser.add_argument('--omega-hz', type=float, help='Precession frequency in Hz (default: 100)')
    lgi_parser.add_argument('--dt-max-ms', type=float, help='Longest spacing in ms (default: 300)')
    lgi_parser.add_argument('--steps', type=int, help='Number of spacings (default: 360)')
    lgi_parser.add_argument('--tau-ms', type=float, help='Target string-decay constant in ms')

    validate_parser = subparsers.add_parser('validate', help='Validate system files and configuration')
    validate_parser.add_argument('--system', help='Validate this file instead of the shipped systems')
    subparsers.add_parser('perf', help='Display performance statistics')
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logging(args.verbose)

    if not args.command:
        parser.print_help()
        return 1

    commands = {
        'singlet':  cmd_singlet,
        'tomo':     cmd_tomo,
        'pps':      cmd_pps,
        'dd':       cmd_dd,
        'lgi':      cmd_lgi,
        'validate': cmd_validate,
        'perf':     cmd_perf,
    }

    try:
        return commands[args.command](args) or 0
    except SpinlabError as e:
        logging.debug(f"{args.command} failed", exc_info=True)
        print(f"[FAIL] {e}")
        return e.exit_code
    except ValueError as e:
        logging.debug(f"{args.command} rejected its input", exc_info=True)
        print(f"[FAIL] {e}")
        return 2


if __name__ == '__main__':
    sys.exit(main())
