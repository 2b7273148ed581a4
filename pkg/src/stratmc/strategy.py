"""
Abstract syntax of strategy expressions.

Nodes are frozen dataclasses compared structurally, so they can live inside
execution states that are deduplicated by value.
"""

from dataclasses import dataclass, fields

from stratmc.equations import format_condition, condition_variables
from stratmc.term import variables


def _cached_hash(self):
    try:
        return self.__dict__['_hash']
    except KeyError:
        h = hash((type(self).__name__,) + tuple(getattr(self, f.name) for f in fields(self)))
        object.__setattr__(self, '_hash', h)
        return h


def node(cls):
    cls = dataclass(frozen=True)(cls)
    cls.__hash__ = _cached_hash
    return cls


class Strategy:
    '''Base class of strategy expressions.'''

    def __str__(self):
        return self.show(0)

    def show(self, level):
        raise NotImplementedError

    def __repr__(self):
        return '{}({})'.format(type(self).__name__, self)


def _wrap(text, own, level):
    return '(' + text + ')' if own < level else text


# Precedence levels used when printing.
_COND, _UNION, _SEQ, _POSTFIX = 1, 2, 3, 4


@node
class Idle(Strategy):
    def show(self, level):
        return 'idle'


@node
class Fail(Strategy):
    def show(self, level):
        return 'fail'


@node
class RuleApp(Strategy):
    '''Application of the rules labeled `label` (any rule when `label` is None).'''
    label: object = None
    subst: tuple = ()
    cond_strats: tuple = ()
    top: bool = False

    def show(self, level):
        text = 'all' if self.label is None else self.label
        if self.subst:
            text += '[' + ', '.join('{} <- {}'.format(n, t) for n, t in self.subst) + ']'
        if self.cond_strats:
            text += '{' + ', '.join(s.show(0) for s in self.cond_strats) + '}'
        return 'top(' + text + ')' if self.top else text


@node
class MatchTest(Strategy):
    mode: str
    pattern: object
    condition: tuple = ()

    def show(self, level):
        text = '{} {}'.format(self.mode, self.pattern)
        if self.condition:
            text += ' s.t. ' + format_condition(self.condition)
        return _wrap(text, _COND, level)


@node
class Seq(Strategy):
    items: tuple

    def show(self, level):
        return _wrap(' ; '.join(s.show(_SEQ + 1) for s in self.items), _SEQ, level)


@node
class Union(Strategy):
    items: tuple

    def show(self, level):
        return _wrap(' | '.join(s.show(_UNION + 1) for s in self.items), _UNION, level)


@node
class Star(Strategy):
    sub: Strategy

    def show(self, level):
        return self.sub.show(_POSTFIX + 1) + ' *'


@node
class Plus(Strategy):
    sub: Strategy

    def show(self, level):
        return self.sub.show(_POSTFIX + 1) + ' +'


@node
class Bang(Strategy):
    sub: Strategy

    def show(self, level):
        return self.sub.show(_POSTFIX + 1) + ' !'


@node
class Conditional(Strategy):
    cond: Strategy
    then: Strategy
    otherwise: Strategy

    def show(self, level):
        return _wrap('{} ? {} : {}'.format(self.cond.show(_UNION), self.then.show(_UNION),
                                          self.otherwise.show(_UNION)), _COND, level)


@node
class OrElse(Strategy):
    first: Strategy
    second: Strategy

    def show(self, level):
        return _wrap('{} or-else {}'.format(self.first.show(_COND), self.second.show(_UNION)),
                     _COND, level)


@node
class Not(Strategy):
    sub: Strategy

    def show(self, level):
        return 'not(' + self.sub.show(0) + ')'


@node
class Try(Strategy):
    sub: Strategy

    def show(self, level):
        return 'try(' + self.sub.show(0) + ')'


@node
class Test(Strategy):
    sub: Strategy

    def show(self, level):
        return 'test(' + self.sub.show(0) + ')'


@node
class Matchrew(Strategy):
    mode: str
    pattern: object
    condition: tuple
    parts: tuple

    def show(self, level):
        text = '{}rew {}'.format(self.mode, self.pattern)
        if self.condition:
            text += ' s.t. ' + format_condition(self.condition)
        text += ' by ' + ', '.join('{} using {}'.format(v, s.show(_UNION)) for v, s in self.parts)
        return _wrap(text, _COND, level)


@node
class Call(Strategy):
    name: str
    args: tuple = ()

    def show(self, level):
        if not self.args:
            return self.name
        return '{}({})'.format(self.name, ', '.join(str(a) for a in self.args))


IDLE = Idle()
FAIL = Fail()


def is_anywhere(mode):
    return mode.startswith('a')


def is_extension(mode):
    return mode.startswith('x')


def desugar(strategy):
    '''Rewrite derived combinators into the core language.'''
    s = strategy
    if isinstance(s, (Idle, Fail, MatchTest, Call)):
        return s
    if isinstance(s, RuleApp):
        if not s.cond_strats:
            return s
        return RuleApp(s.label, s.subst, tuple(desugar(c) for c in s.cond_strats), s.top)
    if isinstance(s, Seq):
        return Seq(tuple(desugar(i) for i in s.items))
    if isinstance(s, Union):
        return Union(tuple(desugar(i) for i in s.items))
    if isinstance(s, Star):
        return Star(desugar(s.sub))
    if isinstance(s, Conditional):
        return Conditional(desugar(s.cond), desugar(s.then), desugar(s.otherwise))
    if isinstance(s, Matchrew):
        return Matchrew(s.mode, s.pattern, s.condition,
                        tuple((v, desugar(p)) for v, p in s.parts))
    if isinstance(s, Plus):
        sub = desugar(s.sub)
        return Seq((sub, Star(sub)))
    if isinstance(s, Bang):
        sub = desugar(s.sub)
        return Seq((Star(sub), Conditional(sub, FAIL, IDLE)))
    if isinstance(s, OrElse):
        return Conditional(desugar(s.first), IDLE, desugar(s.second))
    if isinstance(s, Not):
        return Conditional(desugar(s.sub), FAIL, IDLE)
    if isinstance(s, Try):
        return Conditional(desugar(s.sub), IDLE, IDLE)
    if isinstance(s, Test):
        return desugar(Not(Not(s.sub)))
    raise TypeError('unknown strategy node {!r}'.format(s))


def is_core(strategy):
    '''Whether only core constructors occur in the expression.'''
    s = strategy
    if isinstance(s, (Plus, Bang, OrElse, Not, Try, Test)):
        return False
    if isinstance(s, RuleApp):
        return all(is_core(c) for c in s.cond_strats)
    if isinstance(s, (Seq, Union)):
        return all(is_core(i) for i in s.items)
    if isinstance(s, Star):
        return is_core(s.sub)
    if isinstance(s, Conditional):
        return is_core(s.cond) and is_core(s.then) and is_core(s.otherwise)
    if isinstance(s, Matchrew):
        return all(is_core(p) for _, p in s.parts)
    return True


def children(s):
    if isinstance(s, RuleApp):
        return s.cond_strats
    if isinstance(s, (Seq, Union)):
        return s.items
    if isinstance(s, (Star, Plus, Bang, Not, Try, Test)):
        return (s.sub,)
    if isinstance(s, Conditional):
        return (s.cond, s.then, s.otherwise)
    if isinstance(s, OrElse):
        return (s.first, s.second)
    if isinstance(s, Matchrew):
        return tuple(p for _, p in s.parts)
    return ()


def calls(strategy):
    '''Yield every `Call` node in the expression.'''
    if isinstance(strategy, Call):
        yield strategy
    for c in children(strategy):
        yield from calls(c)


def rule_apps(strategy):
    if isinstance(strategy, RuleApp):
        yield strategy
    for c in children(strategy):
        yield from rule_apps(c)


def unbound_variables(strategy, bound):
    '''Variables used by calls and rule substitutions that nothing binds.

    Match patterns and conditions bind their variables for the tests and
    matchrew parts that use them.
    '''
    s = strategy
    missing = set()
    if isinstance(s, Call):
        for a in s.args:
            missing |= variables(a) - bound
    elif isinstance(s, RuleApp):
        for _, t in s.subst:
            missing |= variables(t) - bound
    if isinstance(s, Matchrew):
        inner = bound | variables(s.pattern) | condition_variables(s.condition)
        for _, p in s.parts:
            missing |= unbound_variables(p, inner)
        return missing
    for c in children(s):
        missing |= unbound_variables(c, bound)
    return missing
