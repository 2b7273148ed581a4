"""
LTL model checking by nested depth-first search over the product of a model
graph with the Büchi automaton of the negated property.
"""

import logging
from dataclasses import dataclass, field

from tele.meter import SumMeter

from stratmc.buchi import to_buchi
from stratmc.engine import SOLUTION, DEADLOCK
from stratmc.errors import InvalidCounterexample
from stratmc.ltl import atoms, eval_on_lasso, negate_and_normalize
from stratmc.model import ModelGraph, UncontrolledGraph
from stratmc.util import timer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Step:
    '''A model state of a trace together with the label of the transition leaving it.'''
    term: object
    label: object
    state_id: int

    def __str__(self):
        return '{{{}, {}}}'.format(self.term, self.label)

    def to_json(self):
        return {'term': str(self.term), 'label': str(self.label)}


@dataclass
class Counterexample:
    prefix: list
    cycle: list

    def __str__(self):
        return 'counterexample({}, {})'.format(' '.join(str(s) for s in self.prefix),
                                               ' '.join(str(s) for s in self.cycle))

    def to_json(self):
        return {'prefix': [s.to_json() for s in self.prefix],
                'cycle': [s.to_json() for s in self.cycle]}

    @property
    def steps(self):
        return self.prefix + self.cycle

    def letters(self, graph, props):
        return ([graph.labels(s.state_id, props) for s in self.prefix],
                [graph.labels(s.state_id, props) for s in self.cycle])


@dataclass
class ModelCheckResult:
    holds: bool
    counterexample: Counterexample = None
    states: int = 0
    automaton_states: int = 0
    graph: object = field(default=None, repr=False, compare=False)

    def __bool__(self):
        return self.holds


@dataclass
class ValidationResult:
    '''Truthy when valid; otherwise `step` and `check` locate the first failure.'''
    ok: bool
    step: int = None
    check: str = None
    detail: str = ''

    def __bool__(self):
        return self.ok


class _Product:
    '''On-the-fly synchronous product of a model graph with a Büchi automaton.'''

    def __init__(self, graph, automaton, props):
        self.graph = graph
        self.automaton = automaton
        self.props = props
        self._letters = {}

    def letter(self, sid):
        letter = self._letters.get(sid)
        if letter is None:
            letter = self.graph.labels(sid, self.props)
            self._letters[sid] = letter
        return letter

    def initial(self):
        m = self.graph.initial
        return [(m, q) for q in self.automaton.initial_for(self.letter(m))]

    def successors(self, node):
        m, q = node
        result = []
        for target, _ in self.graph.expand(m):
            for q2 in self.automaton.step(q, self.letter(target)):
                result.append((target, q2))
        return list(dict.fromkeys(result))

    def accepting(self, node):
        return node[1] in self.automaton.accepting


def _nested_dfs(product):
    '''Product lasso `(prefix, cycle)` through an accepting state, or None.'''
    blue = set()
    red = set()

    def inner(seed):
        stack = [(seed, iter(product.successors(seed)))]
        while stack:
            _, children = stack[-1]
            for child in children:
                if child == seed:
                    return [node for node, _ in stack]
                if child not in red:
                    red.add(child)
                    stack.append((child, iter(product.successors(child))))
                    break
            else:
                stack.pop()
        return None

    for root in product.initial():
        if root in blue:
            continue
        blue.add(root)
        stack = [(root, iter(product.successors(root)))]
        while stack:
            node, children = stack[-1]
            advanced = False
            for child in children:
                if child not in blue:
                    blue.add(child)
                    stack.append((child, iter(product.successors(child))))
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            if product.accepting(node):
                cycle = inner(node)
                if cycle is not None:
                    return [n for n, _ in stack], cycle
    return None


def _edge_label(graph, source, target):
    for t, label in graph.expand(source):
        if t == target:
            return label
    raise ValueError('no edge from state {} to state {}'.format(source, target))


def _project(graph, prefix, cycle):
    prefix_ids = [m for m, _ in prefix]
    cycle_ids = [m for m, _ in cycle]
    if len(set(cycle_ids)) == 1:
        cycle_ids = cycle_ids[:1]
        while prefix_ids and prefix_ids[-1] == cycle_ids[0]:
            prefix_ids.pop()
    ids = prefix_ids + cycle_ids

    def step(i):
        following = ids[i + 1] if i + 1 < len(ids) else cycle_ids[0]
        return Step(graph.term(ids[i]), _edge_label(graph, ids[i], following), ids[i])

    steps = [step(i) for i in range(len(ids))]
    prefix_steps, cycle_steps = steps[:len(prefix_ids)], steps[len(prefix_ids):]
    # A stuttering twin is shown as its flag-0 state looping on solution.
    if (len(cycle_steps) == 1 and graph.flag(cycle_steps[0].state_id) == 1
            and prefix_steps and prefix_steps[-1].label == SOLUTION):
        last = prefix_steps.pop()
        cycle_steps = [Step(last.term, SOLUTION, last.state_id)]
    return Counterexample(prefix_steps, cycle_steps)


def emptiness_check(graph, automaton, props):
    '''None when the product language is empty, else a model counterexample.'''
    lasso = _nested_dfs(_Product(graph, automaton, props))
    if lasso is None:
        return None
    return _project(graph, *lasso)


def build_graph(module, term, strategy=None, config=None, progress=False):
    '''The strategy-controlled model, or the uncontrolled one when no strategy is given.'''
    if strategy is None:
        return UncontrolledGraph(module, term, config, progress)
    return ModelGraph(module, term, strategy, config, progress)


def check_graph(graph, formula, meter=None):
    props = atoms(formula)
    automaton = to_buchi(negate_and_normalize(formula))
    logger.info('property automaton has %d states', len(automaton))
    with timer(meter if meter is not None else SumMeter()):
        counterexample = emptiness_check(graph, automaton, props)
    graph.progress.finish()
    result = ModelCheckResult(counterexample is None, counterexample, len(graph),
                              len(automaton), graph)
    logger.info('model checking visited %d system states', result.states)
    return result


def model_check(module, term, formula, strategy=None, config=None, progress=False, meter=None):
    '''Decide whether every execution of `strategy` from `term` satisfies `formula`.'''
    graph = build_graph(module, term, strategy, config, progress)
    return ensure_valid(check_graph(graph, formula, meter), formula, graph)


def ensure_valid(result, formula, graph):
    '''Return `result`, raising `InvalidCounterexample` when its counterexample does not replay.'''
    if result.counterexample is not None:
        validation = validate_counterexample(result.counterexample, formula, graph)
        if not validation:
            raise InvalidCounterexample(validation.step, validation.check, validation.detail)
    return result


def _twin_of(graph, source, target_step):
    '''Whether `source` reaches the flag-1 duplicate of the target term.'''
    return any(label == SOLUTION and graph.flag(t) == 1 and graph.term(t) == target_step.term
               for t, label in graph.expand(source))


def validate_counterexample(counterexample, formula, graph):
    steps = counterexample.steps
    if not counterexample.cycle:
        return ValidationResult(False, len(steps), 'replay', 'empty cycle')
    reducer = graph.reducer
    rules = graph.module.rules
    loop = len(counterexample.prefix)

    def following(i):
        return steps[i + 1] if i + 1 < len(steps) else steps[loop]

    for i, step in enumerate(steps):
        after = following(i)
        kind = step.label.kind
        if kind == 'rule':
            named = [r for r in rules if r.name == step.label.name]
            if named and not any(r.rewrite_fragments for r in named):
                results = {t for _, t in reducer.one_step(step.term, named)}
                if after.term not in results:
                    return ValidationResult(False, i, 'rewrite',
                                            '{} is not a one-step rewrite of {} by {}'.format(
                                                after.term, step.term, step.label))
        elif kind in (SOLUTION.kind, DEADLOCK.kind) and after.term != step.term:
            return ValidationResult(False, i, 'rewrite', 'stuttering step changes the term')

    if steps[0].state_id != graph.initial:
        return ValidationResult(False, 0, 'replay', 'trace does not start at the initial state')
    for i, step in enumerate(steps):
        after = following(i)
        if graph.term(step.state_id) != step.term:
            return ValidationResult(False, i, 'replay', 'term differs from the model state')
        edge = (after.state_id, step.label)
        if edge not in graph.expand(step.state_id) and not (
                step.label == SOLUTION and _twin_of(graph, step.state_id, after)):
            return ValidationResult(False, i, 'replay', 'no such transition in the model')

    prefix, cycle = counterexample.letters(graph, atoms(formula))
    if eval_on_lasso(formula, prefix, cycle):
        return ValidationResult(False, len(steps), 'formula', 'the trace satisfies the formula')
    return ValidationResult(True)


def format_result(result):
    if result.holds:
        return 'The property is satisfied ({} system states).'.format(result.states)
    return 'The property is not satisfied ({} system states).\n{}'.format(
        result.states, result.counterexample)
