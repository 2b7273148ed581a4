#!/usr/bin/env python3

"""
This script runs verdict batteries: lists of model checking problems whose
expected outcome is known.

A battery is a JSON file holding a list of checks, each one with the keys
`file`, `term`, `formula` and `expected` ("satisfied" or "refuted"), and
optionally `module`, `strategy` and `opaque` (a list of strategy names).
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from tabulate import tabulate
from tele.meter import SumMeter

from stratmc.checker import model_check
from stratmc.engine import EngineConfig, DEFAULT_STATE_LIMIT
from stratmc.errors import StratMCError
from stratmc.module import load_module
from stratmc.parser import parse_formula, parse_strategy, parse_term

logger = logging.getLogger(__name__)

SATISFIED = 'satisfied'
REFUTED = 'refuted'


def parse_args(argv=None):
    """Parse command-line arguments."""

    parser = argparse.ArgumentParser(description='Model checking verdict battery runner')
    parser.add_argument('batteries', type=str, nargs='*', metavar='JSON',
                        help='battery files (default: every file in experiments/)')
    parser.add_argument('--state-limit', type=int, default=DEFAULT_STATE_LIMIT, metavar='N',
                        help='ceiling on explored states (default={})'.format(DEFAULT_STATE_LIMIT))
    parser.add_argument('--verbose', action='store_true', default=False,
                        help='log debugging information')

    args = parser.parse_args(argv)

    if not args.batteries:
        args.batteries = sorted(str(p) for p in Path('experiments').glob('*.json'))

    return args


def load_battery(path):
    with open(path, 'r') as f:
        return json.load(f)


def run_check(check, state_limit=DEFAULT_STATE_LIMIT):
    '''Run one battery entry; returns (verdict, model states, seconds).'''

    module = load_module(check['file'], check.get('module'))
    config = EngineConfig(state_limit=state_limit, opaque=frozenset(check.get('opaque', ())))
    term = parse_term(check['term'], module)
    formula = parse_formula(check['formula'], module)
    strategy = parse_strategy(check['strategy'], module) if check.get('strategy') else None

    meter = SumMeter()
    result = model_check(module, term, formula, strategy, config, meter=meter)
    return (SATISFIED if result.holds else REFUTED), result.states, meter.value()


def main(argv=None):
    """Main battery entrypoint function; returns the exit status."""

    args = parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)

    headers = ['Term', 'Strategy', 'Formula', 'Verdict', 'Expected', 'States', 't (s)']
    mismatches = 0

    for battery in args.batteries:
        rows = []
        for check in load_battery(battery):
            try:
                verdict, states, seconds = run_check(check, args.state_limit)
            except StratMCError as e:
                logger.error('%s: %s', check['formula'], e)
                verdict, states, seconds = 'error', None, None
            if verdict != check['expected']:
                mismatches += 1
            rows.append([
                check['term'],
                check.get('strategy') or '(uncontrolled)',
                check['formula'],
                verdict,
                check['expected'],
                states,
                seconds,
            ])

        print()
        print('# ' + Path(battery).stem)
        print()
        print(tabulate(rows, headers, floatfmt='.3f'))

    if mismatches:
        print('\n{} unexpected verdicts'.format(mismatches))
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
