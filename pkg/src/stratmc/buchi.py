"""
Translation of LTL formulae in negation normal form into Büchi automata by
the tableau construction of Gerth, Peled, Vardi and Wolper, followed by
degeneralization.

Automaton states carry their guard (propositions required to hold and to
fail); a transition into a state is enabled when the guard of the target
holds in the letter read.
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field

from stratmc.ltl import (TrueBool, FalseBool, Prop, Not, And, Or, Next, Until, Release, is_normal,
                         to_string)

logger = logging.getLogger(__name__)

INIT = -1


@dataclass
class _Node:
    name: int
    incoming: set
    new: set
    old: set
    next: set


@dataclass
class BuchiAutomaton:
    guards: list
    successors: dict
    initial: list
    accepting: set = field(default_factory=set)

    def __len__(self):
        return len(self.guards)

    def enabled(self, state, letter):
        positive, negative = self.guards[state]
        return positive <= letter and not (negative & letter)

    def transitions(self):
        '''`(from, guard, to)` triples.'''
        for source in range(len(self)):
            for target in self.successors.get(source, ()):
                yield source, self.guards[target], target

    def initial_for(self, letter):
        return [q for q in self.initial if self.enabled(q, letter)]

    def step(self, state, letter):
        return [q for q in self.successors.get(state, ()) if self.enabled(q, letter)]


def _pick(formulae):
    '''Removes and returns the obligation with the smallest printed form.'''
    eta = min(formulae, key=to_string)
    formulae.discard(eta)
    return eta


def _expand(root, counter):
    '''Tableau nodes of `root`, explored with an explicit stack of open nodes.'''
    nodes = []
    stack = [root]
    while stack:
        node = stack.pop()
        if not node.new:
            for other in nodes:
                if other.old == node.old and other.next == node.next:
                    other.incoming |= node.incoming
                    break
            else:
                nodes.append(node)
                stack.append(_Node(next(counter), {node.name}, set(node.next), set(), set()))
            continue
        eta = _pick(node.new)
        if isinstance(eta, TrueBool):
            stack.append(node)
        elif isinstance(eta, FalseBool):
            continue
        elif isinstance(eta, (Prop, Not)):
            negation = eta.operand if isinstance(eta, Not) else Not(eta)
            if negation not in node.old:
                node.old.add(eta)
                stack.append(node)
        elif isinstance(eta, And):
            node.new |= {eta.left, eta.right} - node.old
            node.old.add(eta)
            stack.append(node)
        elif isinstance(eta, Next):
            node.old.add(eta)
            node.next.add(eta.operand)
            stack.append(node)
        else:
            if isinstance(eta, Until):
                first, first_next, second = {eta.left}, {eta}, {eta.right}
            elif isinstance(eta, Release):
                first, first_next, second = {eta.right}, {eta}, {eta.left, eta.right}
            elif isinstance(eta, Or):
                first, first_next, second = {eta.left}, set(), {eta.right}
            else:
                raise ValueError('formula {} is not in negation normal form'.format(eta))
            old = node.old | {eta}
            node1 = _Node(next(counter), set(node.incoming), node.new | (first - node.old), old,
                          node.next | first_next)
            node2 = _Node(next(counter), set(node.incoming), node.new | (second - node.old),
                          set(old), set(node.next))
            stack.append(node2)
            stack.append(node1)
    return nodes


def _fulfilled(until, node):
    return until not in node.old or isinstance(until.right, TrueBool) or until.right in node.old


def _subformulas(formula):
    yield formula
    if isinstance(formula, (Not, Next)):
        yield from _subformulas(formula.operand)
    elif isinstance(formula, (And, Or, Until, Release)):
        yield from _subformulas(formula.left)
        yield from _subformulas(formula.right)


def to_buchi(formula):
    '''Büchi automaton accepting the words that satisfy `formula` (in NNF).'''
    if not is_normal(formula):
        raise ValueError('formula is not in negation normal form')
    counter = itertools.count()
    nodes = _expand(_Node(next(counter), {INIT}, {formula}, set(), set()), counter)

    index = {node.name: i for i, node in enumerate(nodes)}
    guards = []
    for node in nodes:
        positive = frozenset(f.term for f in node.old if isinstance(f, Prop))
        negative = frozenset(f.operand.term for f in node.old if isinstance(f, Not))
        guards.append((positive, negative))
    successors = {i: [] for i in range(len(nodes))}
    initial = []
    for i, node in enumerate(nodes):
        for source in sorted(node.incoming):
            if source == INIT:
                initial.append(i)
            else:
                successors[index[source]].append(i)

    untils = list(dict.fromkeys(f for f in _subformulas(formula) if isinstance(f, Until)))
    acceptance = [{i for i, node in enumerate(nodes) if _fulfilled(u, node)}
                  for u in untils]
    automaton = _degeneralize(guards, successors, initial, acceptance)
    logger.debug('automaton for %s: %d states', formula, len(automaton))
    return automaton


def _degeneralize(guards, successors, initial, acceptance):
    if not acceptance:
        return BuchiAutomaton(guards, successors, initial, set(range(len(guards))))
    k = len(acceptance)
    ids = {}
    new_guards = []
    new_successors = {}

    def state(q, i):
        key = (q, i)
        if key not in ids:
            ids[key] = len(new_guards)
            new_guards.append(guards[q])
            queue.append(key)
        return ids[key]

    queue = deque()
    new_initial = [state(q, 0) for q in initial]
    while queue:
        q, i = queue.popleft()
        j = (i + 1) % k if q in acceptance[i] else i
        source = ids[(q, i)]
        new_successors[source] = [state(q2, j) for q2 in successors[q]]
    accepting = {sid for (q, i), sid in ids.items() if i == 0 and q in acceptance[0]}
    return BuchiAutomaton(new_guards, new_successors, new_initial, accepting)


def accepts_lasso(automaton, prefix, cycle):
    '''Whether the automaton accepts the word prefix . cycle^omega.'''
    letters = [frozenset(x) for x in list(prefix) + list(cycle)]
    n = len(letters)
    loop = len(prefix)

    def successors(node):
        position, q = node
        after = position + 1 if position + 1 < n else loop
        return [(after, q2) for q2 in automaton.step(q, letters[after])]

    start = [(0, q) for q in automaton.initial_for(letters[0])]
    reachable = set(start)
    queue = deque(start)
    while queue:
        node = queue.popleft()
        for nxt in successors(node):
            if nxt not in reachable:
                reachable.add(nxt)
                queue.append(nxt)
    for node in reachable:
        if node[1] not in automaton.accepting:
            continue
        seen = set()
        queue = deque(successors(node))
        while queue:
            current = queue.popleft()
            if current == node:
                return True
            if current not in seen:
                seen.add(current)
                queue.extend(successors(current))
    return False
