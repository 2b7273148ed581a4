#!/usr/bin/env python3

"""
Command-line interface: equational reduction, strategy execution, normal
form search, model graphs and LTL model checking of rewriting specifications.

FILE may be a path or the name of a bundled example (`philosophers`,
`scheduling`, `micro`).

Exit status is 0 on success (or a satisfied property), 1 when a property is
refuted and 2 on any error.
"""

import argparse
import json
import logging
import sys

from tele.meter import SumMeter

from stratmc.checker import build_graph, check_graph, ensure_valid, format_result
from stratmc.engine import EngineConfig, StrategyEngine, DEFAULT_STATE_LIMIT
from stratmc.equations import DEFAULT_REWRITE_LIMIT
from stratmc.errors import StratMCError
from stratmc.ltl import atoms
from stratmc.model import prune_failed, search_normal_forms, to_dot, to_json, to_text
from stratmc.module import load_module
from stratmc.parser import parse_formula, parse_strategy, parse_term
from stratmc.util import timer

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_ERROR = 2


def _add_common_arguments(parser):
    parser.add_argument('file', type=str, metavar='FILE',
                        help='specification file or bundled example name')
    parser.add_argument('--module', type=str, metavar='NAME',
                        help='module to use (default: the last one in the file)')
    parser.add_argument('--opaque', type=str, default='', metavar='A,B',
                        help='comma-separated strategies whose executions are single steps')
    parser.add_argument('--unbiased', action='store_true', default=False,
                        help='let every matchrew subterm advance independently')
    parser.add_argument('--state-limit', type=int, default=DEFAULT_STATE_LIMIT, metavar='N',
                        help='ceiling on explored states (default={})'.format(DEFAULT_STATE_LIMIT))
    parser.add_argument('--rewrite-limit', type=int, default=DEFAULT_REWRITE_LIMIT, metavar='N',
                        help='ceiling on equation applications per reduction (default={})'.format(
                            DEFAULT_REWRITE_LIMIT))
    parser.add_argument('--verbose', action='store_true', default=False,
                        help='log debugging information and statistics')
    parser.add_argument('--progress', action='store_true', default=False,
                        help='show a progress bar while exploring')


def build_parser():
    parser = argparse.ArgumentParser(prog='stratmc',
                                     description='Strategy-aware rewriting and LTL model checking')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    reduce_cmd = commands.add_parser('reduce', help='reduce a term to equational normal form')
    _add_common_arguments(reduce_cmd)
    reduce_cmd.add_argument('term', type=str, metavar='TERM')

    srewrite = commands.add_parser('srewrite', help='list the results of a strategy')
    _add_common_arguments(srewrite)
    srewrite.add_argument('term', type=str, metavar='TERM')
    srewrite.add_argument('strategy', type=str, metavar='STRATEGY')
    srewrite.add_argument('--depth-first', action='store_true', default=False,
                          help='explore depth-first instead of breadth-first')
    srewrite.add_argument('--limit', type=int, metavar='K',
                          help='stop after K solutions')

    search = commands.add_parser('search', help='list the rewriting normal forms of a term')
    _add_common_arguments(search)
    search.add_argument('term', type=str, metavar='TERM')

    check = commands.add_parser('check', help='model check an LTL formula')
    _add_common_arguments(check)
    check.add_argument('term', type=str, metavar='TERM')
    check.add_argument('formula', type=str, metavar='FORMULA')
    check.add_argument('strategy', type=str, nargs='?', metavar='STRATEGY',
                       help='strategy controlling the system (default: uncontrolled)')
    check.add_argument('--format', type=str, choices=['text', 'json'], default='text',
                       help='output format (default="text")')

    graph = commands.add_parser('graph', help='print the model graph')
    _add_common_arguments(graph)
    graph.add_argument('term', type=str, metavar='TERM')
    graph.add_argument('strategy', type=str, nargs='?', metavar='STRATEGY',
                       help='strategy controlling the system (default: uncontrolled)')
    graph.add_argument('--format', type=str, choices=['dot', 'json', 'text'], default='dot',
                       help='output format (default="dot")')
    graph.add_argument('--prune-failed', action='store_true', default=False,
                       help='remove states whose executions all fail')
    graph.add_argument('--formula', type=str, metavar='F',
                       help='label states with the propositions of this formula')

    return parser


def engine_config(args):
    opaque = frozenset(name.strip() for name in args.opaque.split(',') if name.strip())
    return EngineConfig(rewrite_limit=args.rewrite_limit, state_limit=args.state_limit,
                        opaque=opaque, biased=not args.unbiased)


def _result_line(term):
    return 'result {}: {}'.format(term.sort, term)


def cmd_reduce(args, module, config, out):
    reducer = module.reducer(config.rewrite_limit)
    term = reducer.reduce(parse_term(args.term, module))
    logger.info('rewrites: %d', reducer.rewrites)
    print(_result_line(term), file=out)
    return EXIT_OK


def cmd_srewrite(args, module, config, out):
    term = parse_term(args.term, module)
    strategy = parse_strategy(args.strategy, module)
    engine = StrategyEngine(module, config)
    solutions = engine.srewrite(term, strategy, args.depth_first, args.limit)
    count = 0
    for count, result in enumerate(solutions, 1):
        print('Solution {}'.format(count), file=out)
        print(_result_line(result), file=out)
        print(file=out)
    print('No more solutions.' if count else 'No solution.', file=out)
    logger.info('states: %d  rewrites: %d  time: %.3fs', engine.stats.states,
                engine.stats.rewrites, engine.search_time.value())
    return EXIT_OK


def cmd_search(args, module, config, out):
    term = parse_term(args.term, module)
    forms, states = search_normal_forms(module, term, config, args.progress)
    for k, (sid, form) in enumerate(forms, 1):
        print('Solution {} (state {})'.format(k, sid), file=out)
        print(_result_line(form), file=out)
        print(file=out)
    print('No more solutions.', file=out)
    print('states: {}'.format(states), file=out)
    return EXIT_OK


def cmd_check(args, module, config, out):
    term = parse_term(args.term, module)
    formula = parse_formula(args.formula, module)
    strategy = parse_strategy(args.strategy, module) if args.strategy else None
    meter = SumMeter()
    graph = build_graph(module, term, strategy, config, args.progress)
    result = ensure_valid(check_graph(graph, formula, meter), formula, graph)
    logger.info('model checking took %.3fs', meter.value())
    if args.format == 'json':
        report = {'holds': result.holds, 'states': result.states}
        if result.counterexample is not None:
            report['counterexample'] = result.counterexample.to_json()
        print(json.dumps(report, indent=2), file=out)
    else:
        print(format_result(result), file=out)
    return EXIT_OK if result.holds else EXIT_REFUTED


def cmd_graph(args, module, config, out):
    term = parse_term(args.term, module)
    strategy = parse_strategy(args.strategy, module) if args.strategy else None
    props = atoms(parse_formula(args.formula, module)) if args.formula else ()
    meter = SumMeter()
    with timer(meter):
        graph = build_graph(module, term, strategy, config, args.progress).explore()
    logger.info('built a graph of %d states in %.3fs', len(graph), meter.value())
    keep = prune_failed(graph) if args.prune_failed else None
    if args.format == 'json':
        print(json.dumps(to_json(graph, keep, props), indent=2), file=out)
    elif args.format == 'text':
        print(to_text(graph, keep, props), file=out)
    else:
        print(to_dot(graph, keep, props), file=out)
    return EXIT_OK


COMMANDS = {
    'reduce': cmd_reduce,
    'srewrite': cmd_srewrite,
    'search': cmd_search,
    'check': cmd_check,
    'graph': cmd_graph,
}


def main(argv=None, out=None, err=None):
    """Main command-line entrypoint; returns the exit status."""

    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        module = load_module(args.file, args.module)
        return COMMANDS[args.command](args, module, engine_config(args), out)
    except (StratMCError, OSError) as e:
        print('error: {}'.format(e), file=err)
        return EXIT_ERROR
    except Exception as e:
        logger.exception('unexpected failure')
        print('error: internal error: {!r}'.format(e), file=err)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
