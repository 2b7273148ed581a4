"""
Equational reduction, condition evaluation and rule matching.
"""

import logging
import operator
from dataclasses import dataclass, field

from stratmc.errors import (NonTermination, UnboundVariable, ArityMismatch,
                            UndefinedProposition, StratMCError)
from stratmc.matching import Matcher, EMPTY_CONTEXT
from stratmc.term import (Application, Literal, Variable, Substitution, instantiate, make,
                          literal, variables)

logger = logging.getLogger(__name__)

DEFAULT_REWRITE_LIMIT = 10 ** 6


@dataclass(frozen=True)
class ConditionFragment:
    '''One conjunct of a condition.

    `kind` is one of `eq` (left = right), `match` (left := right),
    `sort` (left : right, where right is a sort name) or `rewrite`
    (left => right, rules only).
    '''
    kind: str
    left: object
    right: object

    def __str__(self):
        symbol = {'eq': '=', 'match': ':=', 'sort': ':', 'rewrite': '=>'}[self.kind]
        return '{} {} {}'.format(self.left, symbol, self.right)


def condition_variables(condition):
    result = set()
    for fragment in condition:
        result |= variables(fragment.left)
        if fragment.kind != 'sort':
            result |= variables(fragment.right)
    return result


def format_condition(condition):
    return ' /\\ '.join(str(f) for f in condition)


@dataclass(frozen=True)
class Equation:
    lhs: object
    rhs: object
    condition: tuple = ()
    owise: bool = False

    def __str__(self):
        text = '{} = {}'.format(self.lhs, self.rhs)
        if self.condition:
            text = 'c' + text + ' if ' + format_condition(self.condition)
        return text + (' [owise]' if self.owise else '')


@dataclass(frozen=True)
class Rule:
    label: object
    lhs: object
    rhs: object
    condition: tuple = ()
    variables: frozenset = field(default=frozenset(), compare=False, hash=False)

    @property
    def name(self):
        return self.label if self.label is not None else 'unlabeled'

    @property
    def rewrite_fragments(self):
        return sum(1 for f in self.condition if f.kind == 'rewrite')

    def __str__(self):
        text = 'rl [{}] : {} => {}'.format(self.name, self.lhs, self.rhs)
        if self.condition:
            text = 'c' + text + ' if ' + format_condition(self.condition)
        return text


def make_rule(label, lhs, rhs, condition=()):
    names = variables(lhs) | variables(rhs) | condition_variables(condition)
    return Rule(label, lhs, rhs, tuple(condition), frozenset(names))


class PendingRewrite:
    '''A rule match whose rewriting condition fragments are still unsolved.'''

    __slots__ = ('rule', 'context', 'subst', 'remaining', 'rhs', '_hash')

    def __init__(self, rule, context, subst, remaining, rhs):
        self.rule = rule
        self.context = context
        self.subst = subst
        self.remaining = remaining
        self.rhs = rhs
        self._hash = hash((rule.lhs, context, subst, remaining, rhs))

    @property
    def complete(self):
        return not self.remaining

    def __eq__(self, other):
        return (isinstance(other, PendingRewrite) and self._hash == other._hash
                and self.rule == other.rule and self.context == other.context
                and self.subst == other.subst and self.remaining == other.remaining
                and self.rhs == other.rhs)

    def __hash__(self):
        return self._hash


def _truncated_div(a, b):
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


_ARITHMETIC = {
    '+': operator.add,
    '-': operator.sub,
    '*': operator.mul,
    'quo': lambda a, b: _truncated_div(a, b) if b else None,
    'rem': lambda a, b: a - b * _truncated_div(a, b) if b else None,
    'min': min,
    'max': max,
}

_COMPARISON = {
    '<': operator.lt,
    '<=': operator.le,
    '>': operator.gt,
    '>=': operator.ge,
    'divides': lambda a, b: b % a == 0 if a else None,
}


class Reducer:
    '''Equational simplifier and matcher bound to one flattened module.

    Keeps a normal-form cache and a proposition cache that live as long as
    the module.
    '''

    def __init__(self, module, rewrite_limit=DEFAULT_REWRITE_LIMIT):
        self.module = module
        self.signature = module.signature
        self.matcher = Matcher(module.signature)
        self.rewrite_limit = rewrite_limit
        self.rewrites = 0
        self._budget = 0
        self._depth = 0
        self._cache = {}
        self._labels = {}
        self._index = {}
        for eq in module.equations:
            key = eq.lhs.symbol.key
            regular, owise = self._index.setdefault(key, ([], []))
            (owise if eq.owise else regular).append(eq)
        self.true = self.signature.constant('true')
        self.false = self.signature.constant('false')

    # Reduction

    def reduce(self, term):
        '''Equational normal form of `term`.'''
        if self._depth == 0:
            self._budget = 0
        self._depth += 1
        try:
            return self._reduce(term)
        except RecursionError:
            raise NonTermination(self.rewrite_limit)
        finally:
            self._depth -= 1

    def _count(self):
        self.rewrites += 1
        self._budget += 1
        if self._budget > self.rewrite_limit:
            raise NonTermination(self.rewrite_limit)

    def _reduce(self, term):
        if not isinstance(term, Application):
            return term
        cached = self._cache.get(term)
        if cached is not None:
            return cached
        args = tuple(self._reduce(a) for a in term.args)
        current = term if args == term.args else make(term.symbol, args)
        result = self._reduce_top(current)
        self._cache[term] = result
        return result

    def _reduce_top(self, term):
        if not isinstance(term, Application):
            return term
        if term.symbol.builtin:
            value = self._builtin(term)
            if value is not None:
                self._count()
                return value
        rewritten = self._apply_equation(term)
        if rewritten is None:
            return term
        self._count()
        return self._reduce(rewritten)

    def _apply_equation(self, term):
        entry = self._index.get(term.symbol.key)
        if entry is None:
            return None
        for equations in entry:
            for eq in equations:
                if eq.lhs.symbol.assoc:
                    places = self.matcher.positions(term, eq.lhs, ext=True)
                else:
                    places = ((term, EMPTY_CONTEXT),)
                for subject, context in places:
                    for s in self.matcher._match(eq.lhs, subject, {}):
                        for s2 in self._check(eq.condition, s):
                            logger.debug('equation %s applied to %s', eq, term)
                            return context.plug(instantiate(eq.rhs, s2))
        return None

    def _bool(self, value):
        return self.true if value else self.false

    def _builtin(self, term):
        name = term.symbol.name
        args = term.args
        ints = all(isinstance(a, Literal) and isinstance(a.value, int) for a in args)
        if ints:
            values = [a.value for a in args]
            if name == 's' and len(values) == 1:
                return literal(self.signature, values[0] + 1)
            if name in _ARITHMETIC and len(values) == 2:
                result = _ARITHMETIC[name](*values)
                return None if result is None else literal(self.signature, result)
            if name in _COMPARISON and len(values) == 2:
                result = _COMPARISON[name](*values)
                return None if result is None else self._bool(result)
        if name in ('==', '=/='):
            if all(a._ground for a in args):
                return self._bool((args[0] == args[1]) == (name == '=='))
            return None
        truth = [True if a == self.true else False if a == self.false else None for a in args]
        if name == 'not' and len(args) == 1 and truth[0] is not None:
            return self._bool(not truth[0])
        if len(args) != 2:
            return None
        (a, b), (ta, tb) = args, truth
        if name == 'and':
            if ta is False or tb is False:
                return self.false
            if ta is True:
                return b
            if tb is True:
                return a
        elif name == 'or':
            if ta is True or tb is True:
                return self.true
            if ta is False:
                return b
            if tb is False:
                return a
        elif name == 'xor' and ta is not None and tb is not None:
            return self._bool(ta != tb)
        elif name == 'implies':
            if ta is False or tb is True:
                return self.true
            if ta is True:
                return b
        return None

    # Conditions

    def closed(self, term, s):
        '''Instantiate `term` with `s`, which must bind all its variables.'''
        result = instantiate(term, s)
        if not result._ground:
            missing = ', '.join(sorted(str(v) for v in variables(result)))
            raise UnboundVariable('unbound variables {} in {}'.format(missing, term))
        return result

    def _check(self, fragments, s):
        if not fragments:
            yield s
            return
        fragment, rest = fragments[0], fragments[1:]
        kind = fragment.kind
        if kind == 'eq':
            left = self.reduce(self.closed(fragment.left, s))
            right = self.reduce(self.closed(fragment.right, s))
            if left == right:
                yield from self._check(rest, s)
        elif kind == 'match':
            subject = self.reduce(self.closed(fragment.right, s))
            for s1 in self.matcher.match(fragment.left, subject, s):
                yield from self._check(rest, s1)
        elif kind == 'sort':
            value = self.reduce(self.closed(fragment.left, s))
            if self.signature.leq(value.sort, fragment.right):
                yield from self._check(rest, s)
        else:
            raise StratMCError('rewriting condition {} outside a rule'.format(fragment))

    def check_eq_condition(self, condition, subst):
        '''All extensions of `subst` satisfying the (rewrite-free) condition.'''
        results = []
        seen = set()
        for s in self._check(tuple(condition), dict(subst)):
            result = Substitution(s)
            if result not in seen:
                seen.add(result)
                results.append(result)
        return results

    def match(self, pattern, subject, condition=(), anywhere=False, ext=False, subst=None):
        '''All `(Substitution, Context)` matches of `pattern` in `subject`.'''
        results = []
        seen = set()
        base = dict(subst) if subst else {}
        for place, context in self.matcher.positions(subject, pattern, anywhere, ext):
            for s in self.matcher.match(pattern, place, base):
                for s2 in self._check(tuple(condition), s):
                    item = (Substitution(s2), context)
                    if item not in seen:
                        seen.add(item)
                        results.append(item)
        return results

    # Rules

    def instantiate_rule(self, rule, rho):
        '''Apply a rule-application substitution given as `{name: term}`.'''
        if not rho:
            return rule.lhs, rule.rhs, rule.condition
        mapping = {}
        for var in rule.variables:
            if var.name in rho:
                value = rho[var.name]
                if not self.signature.leq(value.sort, var.sort):
                    return None
                mapping[var] = value
        condition = tuple(
            ConditionFragment(f.kind, instantiate(f.left, mapping),
                              f.right if f.kind == 'sort' else instantiate(f.right, mapping))
            for f in rule.condition)
        return instantiate(rule.lhs, mapping), instantiate(rule.rhs, mapping), condition

    def rule_matches(self, term, rule, rho=None, top_only=False):
        '''Matches of `rule` in `term`, as `PendingRewrite` records.

        Equational fragments before the first rewriting fragment are solved;
        the rest of the condition travels in the record.
        '''
        parts = self.instantiate_rule(rule, rho)
        if parts is None:
            return []
        lhs, rhs, condition = parts
        split = next((i for i, f in enumerate(condition) if f.kind == 'rewrite'), len(condition))
        prefix, remaining = condition[:split], condition[split:]
        results = []
        seen = set()
        for place, context in self.matcher.positions(term, lhs, anywhere=not top_only, ext=True):
            for s in self.matcher.match(lhs, place):
                for s2 in self._check(prefix, s):
                    pending = PendingRewrite(rule, context, Substitution(s2), remaining, rhs)
                    if pending not in seen:
                        seen.add(pending)
                        results.append(pending)
        return results

    def continue_rewrite(self, pending, subst):
        '''Solve equational fragments up to the next rewriting fragment.'''
        remaining = pending.remaining
        split = next((i for i, f in enumerate(remaining) if f.kind == 'rewrite'), len(remaining))
        results = []
        for s in self.check_eq_condition(remaining[:split], subst):
            results.append(PendingRewrite(pending.rule, pending.context, s,
                                          remaining[split:], pending.rhs))
        return results

    def result_of(self, pending):
        '''Reduced result term of a complete rewrite.'''
        return self.reduce(pending.context.plug(pending.subst.apply(pending.rhs)))

    def one_step(self, term, rules=None):
        '''All `(label, result)` one-step rewrites of `term` by rules without rewriting conditions.'''
        results = []
        seen = set()
        for rule in (self.module.rules if rules is None else rules):
            if rule.rewrite_fragments:
                continue
            for pending in self.rule_matches(term, rule):
                item = (rule.name, self.result_of(pending))
                if item not in seen:
                    seen.add(item)
                    results.append(item)
        return results

    def rule_variable_names(self, rules):
        names = set()
        for rule in rules:
            names |= {v.name for v in rule.variables}
        return names

    def check_rho(self, label, rules, rho):
        if rho:
            unknown = set(rho) - self.rule_variable_names(rules)
            if unknown:
                raise ArityMismatch('rule {} has no variable named {}'.format(
                    label, ', '.join(sorted(unknown))))

    # Propositions

    def holds(self, state_term, prop):
        '''Whether `state_term |= prop` reduces to true.'''
        key = (state_term, prop)
        cached = self._labels.get(key)
        if cached is not None:
            return cached
        symbol = self.signature.lookup('|=', 2)
        value = self.reduce(make(symbol, (state_term, prop)))
        if value == self.true:
            result = True
        elif value == self.false:
            result = False
        else:
            raise UndefinedProposition(prop, state_term, value)
        self._labels[key] = result
        return result
