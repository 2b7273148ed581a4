"""
Linear temporal logic formulae: syntax tree, conversion from Formula terms,
negation normal form and exact evaluation on ultimately periodic words.
"""

from dataclasses import dataclass

import numpy as np

from stratmc.errors import PropSortMismatch
from stratmc.term import Application


@dataclass(frozen=True)
class Ltl:
    pass


@dataclass(frozen=True)
class TrueBool(Ltl):
    pass


@dataclass(frozen=True)
class FalseBool(Ltl):
    pass


@dataclass(frozen=True)
class Prop(Ltl):
    term: object


@dataclass(frozen=True)
class Not(Ltl):
    operand: Ltl


@dataclass(frozen=True)
class Next(Ltl):
    operand: Ltl


@dataclass(frozen=True)
class Eventually(Ltl):
    operand: Ltl


@dataclass(frozen=True)
class Always(Ltl):
    operand: Ltl


@dataclass(frozen=True)
class And(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Or(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Implies(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Until(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Release(Ltl):
    left: Ltl
    right: Ltl


TRUE = TrueBool()
FALSE = FalseBool()

_UNARY = {'~': Not, 'O': Next, '<>': Eventually, '[]': Always}
_BINARY = {'/\\': And, '\\/': Or, '->': Implies, 'U': Until, 'R': Release}


def to_string(formula):
    '''Infix text accepted back by the formula parser.'''
    f = formula
    if isinstance(f, TrueBool):
        return 'True'
    if isinstance(f, FalseBool):
        return 'False'
    if isinstance(f, Prop):
        return str(f.term)
    for symbol, cls in _UNARY.items():
        if isinstance(f, cls):
            return '{} ({})'.format(symbol, to_string(f.operand))
    for symbol, cls in _BINARY.items():
        if isinstance(f, cls):
            return '({} {} {})'.format(to_string(f.left), symbol, to_string(f.right))
    raise ValueError('Unsupported LTL construct: {}'.format(f))


def _fold(cls, items):
    result = items[-1]
    for item in reversed(items[:-1]):
        result = cls(item, result)
    return result


def formula_from_term(term, signature):
    '''Convert a reduced term of sort Formula into a syntax tree.

    Subterms whose sort is below Prop become atomic propositions and must be
    ground.
    '''
    if signature.leq(term.sort, 'Prop'):
        if not term._ground:
            raise PropSortMismatch('proposition {} is not ground'.format(term))
        return Prop(term)
    if not isinstance(term, Application):
        raise PropSortMismatch('{} is not a formula'.format(term))
    name, arity = term.symbol.name, len(term.args)
    if arity == 0 and name in ('True', 'False'):
        return TRUE if name == 'True' else FALSE
    if not (name in _UNARY or name in _BINARY or name in ('<->', 'W')):
        raise PropSortMismatch('{} does not reduce to a formula'.format(term))
    args = [formula_from_term(a, signature) for a in term.args]
    if arity == 1 and name in _UNARY:
        return _UNARY[name](args[0])
    if arity >= 2 and name in ('/\\', '\\/'):
        return _fold(_BINARY[name], args)
    if arity == 2 and name in _BINARY:
        return _BINARY[name](*args)
    if arity == 2 and name == '<->':
        return And(Implies(args[0], args[1]), Implies(args[1], args[0]))
    if arity == 2 and name == 'W':
        return Or(Until(args[0], args[1]), Always(args[0]))
    raise PropSortMismatch('{} does not reduce to a formula'.format(term))


def nnf(formula):
    '''Negation normal form over True, False, props, negated props, /\\, \\/, O, U and R.'''
    return _nnf(formula, False)


def negate_and_normalize(formula):
    return _nnf(formula, True)


def _nnf(f, negated):
    if isinstance(f, TrueBool):
        return FALSE if negated else f
    if isinstance(f, FalseBool):
        return TRUE if negated else f
    if isinstance(f, Prop):
        return Not(f) if negated else f
    if isinstance(f, Not):
        return _nnf(f.operand, not negated)
    if isinstance(f, And):
        return (Or if negated else And)(_nnf(f.left, negated), _nnf(f.right, negated))
    if isinstance(f, Or):
        return (And if negated else Or)(_nnf(f.left, negated), _nnf(f.right, negated))
    if isinstance(f, Implies):
        return _nnf(Or(Not(f.left), f.right), negated)
    if isinstance(f, Next):
        return Next(_nnf(f.operand, negated))
    if isinstance(f, Eventually):
        if negated:
            return Release(FALSE, _nnf(f.operand, True))
        return Until(TRUE, _nnf(f.operand, False))
    if isinstance(f, Always):
        if negated:
            return Until(TRUE, _nnf(f.operand, True))
        return Release(FALSE, _nnf(f.operand, False))
    if isinstance(f, Until):
        cls = Release if negated else Until
        return cls(_nnf(f.left, negated), _nnf(f.right, negated))
    if isinstance(f, Release):
        cls = Until if negated else Release
        return cls(_nnf(f.left, negated), _nnf(f.right, negated))
    raise ValueError('Unsupported LTL construct: {}'.format(f))


def is_normal(formula):
    f = formula
    if isinstance(f, (TrueBool, FalseBool, Prop)):
        return True
    if isinstance(f, Not):
        return isinstance(f.operand, Prop)
    if isinstance(f, Next):
        return is_normal(f.operand)
    if isinstance(f, (And, Or, Until, Release)):
        return is_normal(f.left) and is_normal(f.right)
    return False


def children(formula):
    if isinstance(formula, (Not, Next, Eventually, Always)):
        return (formula.operand,)
    if isinstance(formula, (And, Or, Implies, Until, Release)):
        return (formula.left, formula.right)
    return ()


def atoms(formula):
    '''Proposition terms occurring in the formula.'''
    if isinstance(formula, Prop):
        return {formula.term}
    result = set()
    for c in children(formula):
        result |= atoms(c)
    return result


def size(formula):
    return 1 + sum(size(c) for c in children(formula))


def eval_on_lasso(formula, prefix, cycle):
    '''Decide `formula` on the word prefix . cycle^omega.

    Letters are collections of the proposition terms that hold. The word
    is folded into `len(prefix) + len(cycle)` positions whose last one loops
    back to the start of the cycle; until and release are the least and
    greatest fixpoints over that finite graph.
    '''
    if not cycle:
        raise ValueError('the cycle of a lasso must be nonempty')
    letters = [set(x) for x in list(prefix) + list(cycle)]
    n = len(letters)
    succ = np.arange(1, n + 1)
    succ[-1] = len(prefix)
    return bool(_eval(formula, letters, succ)[0])


def _eval(f, letters, succ):
    n = len(letters)
    if isinstance(f, TrueBool):
        return np.ones(n, dtype=bool)
    if isinstance(f, FalseBool):
        return np.zeros(n, dtype=bool)
    if isinstance(f, Prop):
        return np.array([f.term in letter for letter in letters], dtype=bool)
    if isinstance(f, Not):
        return ~_eval(f.operand, letters, succ)
    if isinstance(f, Next):
        return _eval(f.operand, letters, succ)[succ]
    if isinstance(f, Eventually):
        return _eval(Until(TRUE, f.operand), letters, succ)
    if isinstance(f, Always):
        return _eval(Release(FALSE, f.operand), letters, succ)
    left = _eval(f.left, letters, succ)
    right = _eval(f.right, letters, succ)
    if isinstance(f, And):
        return left & right
    if isinstance(f, Or):
        return left | right
    if isinstance(f, Implies):
        return ~left | right
    if isinstance(f, Until):
        x = right.copy()
        while True:
            updated = right | (left & x[succ])
            if np.array_equal(updated, x):
                return x
            x = updated
    if isinstance(f, Release):
        x = right.copy()
        while True:
            updated = right & (left | x[succ])
            if np.array_equal(updated, x):
                return x
            x = updated
    raise ValueError('Unsupported LTL construct: {}'.format(f))
