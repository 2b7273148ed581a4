"""
Small-step execution of strategies.

An execution state is a subject term with a stack of pending strategies and
substitution frames (`TermState`), a term being rewritten through its
matchrew subterms (`SubtermState`), or a rule application waiting for the
search of a rewriting condition fragment (`RewcState`). Control steps only
move the strategy bookkeeping forward; system steps rewrite the subject with
one rule. Stacks are tuples with the top item last.
"""

import logging
from collections import deque
from dataclasses import dataclass

from tele.meter import SumMeter

from stratmc import strategy as st
from stratmc.equations import DEFAULT_REWRITE_LIMIT, PendingRewrite
from stratmc.errors import ArityMismatch, StateSpaceCeiling, UnknownRuleLabel, UnknownStrategy
from stratmc.term import EMPTY_SUBSTITUTION, Substitution, instantiate
from stratmc.util import timer

logger = logging.getLogger(__name__)

DEFAULT_STATE_LIMIT = 5 * 10 ** 6


@dataclass(frozen=True)
class EngineConfig:
    rewrite_limit: int = DEFAULT_REWRITE_LIMIT
    state_limit: int = DEFAULT_STATE_LIMIT
    opaque: frozenset = frozenset()
    biased: bool = True


@dataclass(frozen=True)
class Label:
    '''Transition label: a rule name, an opaque strategy, `solution` or `deadlock`.'''
    kind: str
    name: str = None

    def __str__(self):
        if self.kind == 'rule':
            return self.name
        if self.kind == 'opaque':
            return 'opaque({})'.format(self.name)
        return self.kind


SOLUTION = Label('solution')
DEADLOCK = Label('deadlock')


def rule_label(name):
    return Label('rule', name)


@dataclass(frozen=True)
class Frame:
    '''Substitution in force for the strategies stacked above it.'''
    subst: Substitution

    def __str__(self):
        return 'ctx' + str(self.subst)


def vctx(stack):
    for item in reversed(stack):
        if isinstance(item, Frame):
            return item.subst
    return EMPTY_SUBSTITUTION


def normalize(stack):
    '''Canonical form of a stack.

    Frames at the top are popped, of two adjacent frames only the upper one
    is kept, and a frame equal to the substitution already in force is
    dropped.
    '''
    items = list(stack)
    while items and isinstance(items[-1], Frame):
        items.pop()
    result = []
    current = EMPTY_SUBSTITUTION
    for item in items:
        if isinstance(item, Frame):
            if result and isinstance(result[-1], Frame):
                result.pop()
                current = vctx(result)
            if item.subst == current:
                continue
            current = item.subst
        result.append(item)
    return tuple(result)


def format_stack(stack):
    if not stack:
        return 'eps'
    return '[' + ', '.join(str(item) for item in reversed(stack)) + ']'


class ExecState:
    __slots__ = ('stack', '_hash')

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return self._hash

    def is_solution(self):
        return False

    def __repr__(self):
        return '{}({})'.format(type(self).__name__, self)


class TermState(ExecState):
    __slots__ = ('term',)
    __hash__ = ExecState.__hash__

    def __init__(self, term, stack=()):
        self.term = term
        self.stack = stack
        self._hash = hash(('term', term, stack))

    def __eq__(self, other):
        return self is other or (isinstance(other, TermState) and self._hash == other._hash
                                 and self.term == other.term and self.stack == other.stack)

    def is_solution(self):
        return not self.stack

    def __str__(self):
        return '{} @ {}'.format(self.term, format_stack(self.stack))


class SubtermState(ExecState):
    '''Matchrew in progress: `shell` holds the part variables as placeholders.'''

    __slots__ = ('parts', 'shell')
    __hash__ = ExecState.__hash__

    def __init__(self, parts, shell, stack=()):
        self.parts = parts
        self.shell = shell
        self.stack = stack
        self._hash = hash(('subterm', parts, shell, stack))

    def __eq__(self, other):
        return self is other or (isinstance(other, SubtermState) and self._hash == other._hash
                                 and self.parts == other.parts and self.shell == other.shell
                                 and self.stack == other.stack)

    def __str__(self):
        parts = ', '.join('{}: {}'.format(v.name, q) for v, q in self.parts)
        return 'subterm({}; {}) @ {}'.format(parts, self.shell, format_stack(self.stack))


class RewcState(ExecState):
    '''Rule application searching for a solution of a rewriting fragment.

    `inner` executes the fragment's strategy on its lefthand side; when it
    reaches a solution matching `pattern`, the rule continues with the
    remaining fragments of `pending` and strategies `strats`.
    '''

    __slots__ = ('pending', 'pattern', 'inner', 'strats', 'env', 'term')
    __hash__ = ExecState.__hash__

    def __init__(self, pending, pattern, inner, strats, env, term, stack=()):
        self.pending = pending
        self.pattern = pattern
        self.inner = inner
        self.strats = strats
        self.env = env
        self.term = term
        self.stack = stack
        self._hash = hash(('rewc', pending, pattern, inner, strats, env, term, stack))

    def __eq__(self, other):
        return self is other or (isinstance(other, RewcState) and self._hash == other._hash
                                 and self.inner == other.inner and self.pending == other.pending
                                 and self.pattern == other.pattern and self.strats == other.strats
                                 and self.env == other.env and self.term == other.term
                                 and self.stack == other.stack)

    def __str__(self):
        return 'rewc({}, {} => {}; {}) @ {}'.format(
            self.pending.rule.name, self.inner, self.pattern, self.term, format_stack(self.stack))


def canonical_key(state):
    '''Textual fingerprint, equal exactly for structurally equal states.'''
    return str(state)


@dataclass
class SearchStats:
    states: int = 0
    rewrites: int = 0
    solutions: int = 0


class StrategyEngine:
    '''Transition relation of execution states for one flattened module.'''

    def __init__(self, module, config=None):
        self.module = module
        self.config = config or EngineConfig()
        self.reducer = module.reducer(self.config.rewrite_limit)
        self.matcher = self.reducer.matcher
        self.stats = SearchStats()
        self.search_time = SumMeter()
        self._bodies = {}
        self._has_solution = {}
        self._solution_reachable = {}
        self._cterm = {}
        self._unconditional = [r for r in module.rules
                               if r.label is not None and not r.rewrite_fragments]

    # States

    def initial_state(self, term, strategy):
        '''`reduce(term) @ strategy`, with derived combinators expanded.'''
        return TermState(self.reducer.reduce(term), normalize((st.desugar(strategy),)))

    def cterm(self, state):
        '''The subject term an execution state stands for.'''
        if isinstance(state, (TermState, RewcState)):
            return state.term
        cached = self._cterm.get(state)
        if cached is None:
            mapping = {v: self.cterm(q) for v, q in state.parts}
            cached = self.reducer.reduce(instantiate(state.shell, mapping))
            self._cterm[state] = cached
        return cached

    def _subterm(self, parts, shell, stack):
        if all(isinstance(q, TermState) and not q.stack for _, q in parts):
            mapping = {v: q.term for v, q in parts}
            return TermState(self.reducer.reduce(instantiate(shell, mapping)), stack)
        if len(parts) == 1 and not stack and parts[0][0] == shell:
            return parts[0][1]
        return SubtermState(parts, shell, stack)

    def _body(self, definition):
        body = self._bodies.get(definition)
        if body is None:
            body = st.desugar(definition.body)
            self._bodies[definition] = body
        return body

    def _rules(self, app):
        if app.label is None:
            return self._unconditional
        rules = self.module.rules_labeled(app.label)
        if not rules:
            raise UnknownRuleLabel('no rule labeled {}'.format(app.label))
        return rules

    def _rho(self, app, rules, env):
        if not app.subst:
            return None
        rho = {name: self.reducer.reduce(self.reducer.closed(value, env))
               for name, value in app.subst}
        self.reducer.check_rho(app.label, rules, rho)
        return rho

    # Control steps

    def control_steps(self, state):
        '''Successors by one control step, in a deterministic order.'''
        if isinstance(state, TermState):
            return self._term_control(state)
        if isinstance(state, SubtermState):
            return [q for q, system in self._subterm_steps(state) if not system]
        return [q for q, label in self._rewc_steps(state) if label is None]

    def system_steps(self, state):
        '''`(successor, Label)` pairs of one-rule rewrites.'''
        if isinstance(state, TermState):
            return self._term_system(state)
        if isinstance(state, SubtermState):
            return [(q, label) for q, label in self._subterm_steps(state) if label]
        return [(q, label) for q, label in self._rewc_steps(state) if label is not None]

    def _term_control(self, state):
        if not state.stack:
            return []
        t = state.term
        top, rest = state.stack[-1], state.stack[:-1]
        env = vctx(rest)
        if isinstance(top, st.Idle):
            return [TermState(t, normalize(rest))]
        if isinstance(top, st.Fail):
            return []
        if isinstance(top, st.Seq):
            return [TermState(t, normalize(rest + tuple(reversed(top.items))))]
        if isinstance(top, st.Union):
            return [TermState(t, normalize(rest + (item,))) for item in top.items]
        if isinstance(top, st.Star):
            return [TermState(t, normalize(rest)), TermState(t, normalize(rest + (top, top.sub)))]
        if isinstance(top, st.MatchTest):
            if self.reducer.match(top.pattern, t, top.condition, st.is_anywhere(top.mode),
                                  st.is_extension(top.mode), subst=env):
                return [TermState(t, normalize(rest))]
            return []
        if isinstance(top, st.Conditional):
            result = [TermState(t, normalize(rest + (top.then, top.cond)))]
            if not self.has_solution(t, top.cond, env):
                result.append(TermState(t, normalize(rest + (top.otherwise,))))
            return result
        if isinstance(top, st.Matchrew):
            return self._matchrew(t, top, rest, env)
        if isinstance(top, st.Call):
            return self._call(t, top, rest, env)
        if isinstance(top, st.RuleApp):
            return self._rewc_open(t, top, rest, env)
        raise TypeError('strategy {} is not in core form'.format(top))

    def _matchrew(self, t, mr, rest, env):
        result = []
        part_vars = [v for v, _ in mr.parts]
        for sigma, context in self.reducer.match(mr.pattern, t, mr.condition,
                                                 st.is_anywhere(mr.mode),
                                                 st.is_extension(mr.mode), subst=env):
            frame = Frame(sigma)
            parts = tuple((v, TermState(sigma[v], normalize((frame, strategy))))
                          for v, strategy in mr.parts)
            shell = context.plug(sigma.without(part_vars).apply(mr.pattern))
            result.append(self._subterm(parts, shell, normalize(rest)))
        return result

    def _call(self, t, call, rest, env):
        arity = len(call.args)
        definitions = self.module.definitions(call.name, arity)
        if not definitions and arity not in self.module.strategy_arities(call.name):
            raise UnknownStrategy('no strategy {}/{}'.format(call.name, arity))
        args = [self.reducer.reduce(self.reducer.closed(a, env)) for a in call.args]
        logger.debug('call %s(%s)', call.name, ', '.join(str(a) for a in args))
        result = []
        for d in definitions:
            matches = [{}]
            for p, a in zip(d.params, args):
                matches = [s1 for s in matches for s1 in self.matcher.match(p, a, s)]
            for s in matches:
                for sigma in self.reducer.check_eq_condition(d.condition, s):
                    result.append(TermState(t, normalize(rest + (Frame(sigma), self._body(d)))))
        return result

    def _rewc_open(self, t, app, rest, env):
        result = []
        if app.label is None:
            return result
        rules = self._rules(app)
        rho = self._rho(app, rules, env)
        for rule in rules:
            if rule.rewrite_fragments != len(app.cond_strats):
                raise ArityMismatch('rule {} has {} rewriting fragments but {} strategies were given'
                                    .format(rule.name, rule.rewrite_fragments, len(app.cond_strats)))
            if not rule.rewrite_fragments:
                continue
            for pending in self.reducer.rule_matches(t, rule, rho, app.top):
                result.append(self._open_fragment(pending, app.cond_strats, env, t, normalize(rest)))
        return result

    def _open_fragment(self, pending, strats, env, term, stack):
        fragment = pending.remaining[0]
        left = self.reducer.reduce(self.reducer.closed(fragment.left, pending.subst))
        inner = TermState(left, normalize((Frame(env), strats[0])))
        pending = PendingRewrite(pending.rule, pending.context, pending.subst,
                                 pending.remaining[1:], pending.rhs)
        return RewcState(pending, fragment.right, inner, strats[1:], env, term, stack)

    def _rewc_steps(self, state):
        '''Steps of a rewriting-condition state as `(state, label or None)`.

        Every step of the inner search is a control step of the outer state;
        only completing the rule application is a system step.
        '''
        result = []

        def wrap(inner):
            return RewcState(state.pending, state.pattern, inner, state.strats, state.env,
                             state.term, state.stack)

        for q in self.control_steps(state.inner):
            result.append((wrap(q), None))
        for q, _ in self.system_steps(state.inner):
            result.append((wrap(q), None))
        inner = state.inner
        if isinstance(inner, TermState) and not inner.stack:
            pending = state.pending
            for sigma in self.matcher.match(state.pattern, inner.term, pending.subst):
                for p2 in self.reducer.continue_rewrite(pending, Substitution(sigma)):
                    if p2.complete:
                        target = TermState(self.reducer.result_of(p2), state.stack)
                        result.append((target, rule_label(p2.rule.name)))
                    else:
                        result.append((self._open_fragment(p2, state.strats, state.env,
                                                           state.term, state.stack), None))
        return result

    def _subterm_steps(self, state):
        '''Steps of a matchrew state as `(state, label or None)`.'''
        result = []
        parts = state.parts
        for i, (v, q) in enumerate(parts):
            for q2 in self.control_steps(q):
                result.append((self._replace(state, i, q2), None))
            for q2, label in self.system_steps(q):
                result.append((self._replace(state, i, q2), label))
            if self.config.biased and not self.solution_reachable(q):
                break
        return result

    def _replace(self, state, i, part):
        parts = state.parts[:i] + ((state.parts[i][0], part),) + state.parts[i + 1:]
        return self._subterm(parts, state.shell, state.stack)

    # System steps

    def _term_system(self, state):
        if not state.stack or not isinstance(state.stack[-1], st.RuleApp):
            return []
        app = state.stack[-1]
        env = vctx(state.stack[:-1])
        rest = normalize(state.stack[:-1])
        rules = self._rules(app)
        rho = self._rho(app, rules, env)
        result = []
        seen = set()
        for rule in rules:
            if rule.rewrite_fragments:
                continue
            if app.cond_strats:
                raise ArityMismatch('rule {} has no rewriting fragments but {} strategies were given'
                                    .format(rule.name, len(app.cond_strats)))
            for pending in self.reducer.rule_matches(state.term, rule, rho, app.top):
                item = (TermState(self.reducer.result_of(pending), rest), rule_label(rule.name))
                if item not in seen:
                    seen.add(item)
                    result.append(item)
                    logger.debug('rule %s rewrites %s', rule.name, state.term)
        return result

    # Relations

    def _check_size(self, size):
        if size > self.config.state_limit:
            raise StateSpaceCeiling(self.config.state_limit)

    def control_closure(self, state):
        '''States reachable from `state` by control steps, itself included.'''
        seen = {state}
        order = [state]
        queue = deque([state])
        while queue:
            q = queue.popleft()
            for q2 in self.control_steps(q):
                if q2 not in seen:
                    seen.add(q2)
                    order.append(q2)
                    queue.append(q2)
                    self._check_size(len(seen))
        return order

    def _opaque_call(self, state):
        if isinstance(state, TermState) and state.stack:
            top = state.stack[-1]
            if isinstance(top, st.Call) and top.name in self.config.opaque:
                return top
        return None

    def successors(self, state, opaque=True):
        '''The `=>` relation: control steps followed by one system step.

        With opaque strategies configured, a call to one of them heading a
        term state is run to completion and contributes one `opaque(name)`
        edge per solution.
        '''
        result = {}
        seen = {state}
        queue = deque([state])
        while queue:
            q = queue.popleft()
            call = self._opaque_call(q) if opaque else None
            if call is not None:
                for item in self.opaque_successors(q):
                    result.setdefault(item, None)
                continue
            for q2, label in self.system_steps(q):
                result.setdefault((q2, label), None)
            for q2 in self.control_steps(q):
                if q2 not in seen:
                    seen.add(q2)
                    queue.append(q2)
                    self._check_size(len(seen))
        return list(result)

    def opaque_successors(self, state):
        '''Run the opaque call heading `state` and yield one step per result term.'''
        call = state.stack[-1]
        rest = normalize(state.stack[:-1])
        start = TermState(state.term, normalize((Frame(vctx(state.stack[:-1])), call)))
        label = Label('opaque', call.name)
        return [(TermState(t, rest), label) for t in self._solutions(start)]

    def steps(self, state):
        '''All single control and system steps, unlabeled.'''
        return self.control_steps(state) + [q for q, _ in self.system_steps(state)]

    def _solutions(self, start, depth_first=False):
        seen = {start}
        frontier = deque([start])
        found = {}
        while frontier:
            q = frontier.pop() if depth_first else frontier.popleft()
            if isinstance(q, TermState) and not q.stack:
                found.setdefault(q.term, None)
            for q2 in self.steps(q):
                if q2 not in seen:
                    seen.add(q2)
                    frontier.append(q2)
                    self._check_size(len(seen))
        return list(found)

    def has_solution(self, term, strategy, env=EMPTY_SUBSTITUTION):
        '''Whether `strategy` has some solution from `term` under `env`.'''
        key = (term, strategy, env)
        cached = self._has_solution.get(key)
        if cached is not None:
            return cached
        start = TermState(term, normalize((Frame(env), strategy)))
        seen = {start}
        frontier = [start]
        result = False
        while frontier and not result:
            q = frontier.pop()
            if isinstance(q, TermState) and not q.stack:
                result = True
                break
            for q2 in self.steps(q):
                if q2 not in seen:
                    seen.add(q2)
                    frontier.append(q2)
                    self._check_size(len(seen))
        self._has_solution[key] = result
        return result

    def solution_reachable(self, state):
        '''Membership in Sol: an empty-stack term state is control reachable.'''
        cached = self._solution_reachable.get(state)
        if cached is not None:
            return cached
        result = any(isinstance(q, TermState) and not q.stack for q in self.control_closure(state))
        self._solution_reachable[state] = result
        return result

    def srewrite(self, term, strategy, depth_first=False, limit=None):
        '''Yield the distinct result terms of `strategy` from `term`.

        Breadth-first by default; statistics accumulate in `self.stats`.
        '''
        start = self.initial_state(term, strategy)
        self.stats = SearchStats()
        rewrites = self.reducer.rewrites
        seen = {start}
        frontier = deque([start])
        found = set()
        while frontier:
            with timer(self.search_time):
                q = frontier.pop() if depth_first else frontier.popleft()
                self.stats.states = len(seen)
                successors = self.steps(q)
                for q2 in successors:
                    if q2 not in seen:
                        seen.add(q2)
                        frontier.append(q2)
                        self._check_size(len(seen))
                self.stats.rewrites = self.reducer.rewrites - rewrites
            if isinstance(q, TermState) and not q.stack and q.term not in found:
                found.add(q.term)
                self.stats.solutions += 1
                yield q.term
                if limit is not None and self.stats.solutions >= limit:
                    return
        self.stats.states = len(seen)
