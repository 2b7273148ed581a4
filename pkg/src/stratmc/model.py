"""
Kripke structures explored on the fly: the strategy-controlled model and the
uncontrolled rewrite graph, plus pruning and export.
"""

import logging
from collections import deque

import graphviz
from tabulate import tabulate

from stratmc.engine import StrategyEngine, EngineConfig, SOLUTION, DEADLOCK, rule_label
from stratmc.errors import StateSpaceCeiling
from stratmc.util import ExplorationProgress

logger = logging.getLogger(__name__)


class Graph:
    '''Shared bookkeeping: dense state ids, memoized expansion and labeling.'''

    def __init__(self, module, config=None, progress=False):
        self.module = module
        self.config = config or EngineConfig()
        self.reducer = module.reducer(self.config.rewrite_limit)
        self.states = []
        self.seen = {}
        self._edges = {}
        self.progress = ExplorationProgress(progress)
        self.initial = None

    def _intern(self, key):
        sid = self.seen.get(key)
        if sid is None:
            sid = len(self.states)
            if sid >= self.config.state_limit:
                raise StateSpaceCeiling(self.config.state_limit)
            self.seen[key] = sid
            self.states.append(key)
            self.progress.update(len(self.states))
        return sid

    def __len__(self):
        return len(self.states)

    def term(self, sid):
        raise NotImplementedError

    def flag(self, sid):
        return 0

    def expand(self, sid):
        edges = self._edges.get(sid)
        if edges is None:
            edges = list(dict.fromkeys(self._successors(sid)))
            self._edges[sid] = edges
        return edges

    def _successors(self, sid):
        raise NotImplementedError

    def labels(self, sid, props):
        '''The propositions of `props` that hold in state `sid`.'''
        term = self.term(sid)
        return frozenset(p for p in props if self.reducer.holds(term, p))

    def explore(self):
        '''Expand every reachable state.'''
        done = {self.initial}
        queue = deque([self.initial])
        while queue:
            sid = queue.popleft()
            for target, _ in self.expand(sid):
                if target not in done:
                    done.add(target)
                    queue.append(target)
        self.progress.finish()
        logger.info('explored %d states', len(self.states))
        return self

    def edges(self):
        for sid in sorted(self._edges):
            for target, label in self._edges[sid]:
                yield sid, target, label


class ModelGraph(Graph):
    '''Strategy-controlled model: execution states with a stuttering flag.

    A state that can finish the strategy (it is in Sol) either gets a
    `solution` self-loop, when it has no other successor, or an edge to its
    flag-1 duplicate, whose only successor is itself.
    '''

    def __init__(self, module, term, strategy, config=None, progress=False):
        super().__init__(module, config, progress)
        self.engine = StrategyEngine(module, self.config)
        self.initial = self._intern((self.engine.initial_state(term, strategy), 0))

    def term(self, sid):
        return self.engine.cterm(self.states[sid][0])

    def flag(self, sid):
        return self.states[sid][1]

    def exec_state(self, sid):
        return self.states[sid][0]

    def _successors(self, sid):
        state, flag = self.states[sid]
        if flag == 1:
            return [(sid, SOLUTION)]
        edges = [(self._intern((q, 0)), label) for q, label in self.engine.successors(state)]
        if self.engine.solution_reachable(state):
            if edges:
                edges.append((self._intern((state, 1)), SOLUTION))
            else:
                edges.append((sid, SOLUTION))
        logger.debug('state %d has %d successors', sid, len(edges))
        return edges


class UncontrolledGraph(Graph):
    '''Terms under one-step rewriting; deadlocked terms loop on `deadlock`.'''

    def __init__(self, module, term, config=None, progress=False):
        super().__init__(module, config, progress)
        self.initial = self._intern(self.reducer.reduce(term))

    def term(self, sid):
        return self.states[sid]

    def _successors(self, sid):
        steps = self.reducer.one_step(self.states[sid])
        if not steps:
            return [(sid, DEADLOCK)]
        return [(self._intern(t), rule_label(name)) for name, t in steps]


def search_normal_forms(module, term, config=None, progress=False):
    '''Deadlocked terms reachable from `term`, as `(state id, term)`, and the state count.'''
    graph = UncontrolledGraph(module, term, config, progress).explore()
    forms = [(sid, graph.term(sid)) for sid in range(len(graph))
             if graph.expand(sid) == [(sid, DEADLOCK)]]
    return forms, len(graph)


def _strongly_connected(graph):
    '''Tarjan's algorithm, iterative; yields components as lists of ids.'''
    index = {}
    low = {}
    on_stack = set()
    stack = []
    counter = 0
    for root in range(len(graph)):
        if root in index:
            continue
        work = [(root, iter([t for t, _ in graph.expand(root)]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, children = work[-1]
            advanced = False
            for child in children:
                if child not in index:
                    index[child] = low[child] = counter
                    counter += 1
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter([t for t, _ in graph.expand(child)])))
                    advanced = True
                    break
                if child in on_stack:
                    low[node] = min(low[node], index[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                yield component


def prune_failed(graph):
    '''Ids of the states from which some cycle is reachable.

    The graph must be fully explored. Solution self-loops count as cycles,
    so what is removed are exactly the states whose executions all fail.
    '''
    live = set()
    for component in _strongly_connected(graph):
        if len(component) > 1 or any(t == component[0] for t, _ in graph.expand(component[0])):
            live.update(component)
    predecessors = {}
    for source, target, _ in graph.edges():
        predecessors.setdefault(target, []).append(source)
    queue = deque(live)
    while queue:
        sid = queue.popleft()
        for source in predecessors.get(sid, ()):
            if source not in live:
                live.add(source)
                queue.append(source)
    return live


def _selection(graph, keep):
    ids = range(len(graph)) if keep is None else sorted(keep)
    chosen = set(ids)
    edges = [(a, b, label) for a, b, label in graph.edges() if a in chosen and b in chosen]
    return list(ids), edges


def to_json(graph, keep=None, props=()):
    ids, edges = _selection(graph, keep)
    return {
        'states': [{'id': sid, 'term': str(graph.term(sid)), 'flag': graph.flag(sid),
                    'labels': sorted(str(p) for p in graph.labels(sid, props))}
                   for sid in ids],
        'edges': [{'from': a, 'to': b, 'label': str(label)} for a, b, label in edges],
        'initial': graph.initial,
    }


def to_dot(graph, keep=None, props=()):
    ids, edges = _selection(graph, keep)
    dot = graphviz.Digraph(name='model', node_attr={'shape': 'box', 'fontsize': '10'})
    for sid in ids:
        text = str(graph.term(sid))
        labels = graph.labels(sid, props)
        if labels:
            text += '\n{' + ', '.join(sorted(str(p) for p in labels)) + '}'
        attrs = {'style': 'dashed'} if graph.flag(sid) else {}
        if sid == graph.initial:
            attrs['penwidth'] = '2'
        dot.node(str(sid), text, **attrs)
    for a, b, label in edges:
        dot.edge(str(a), str(b), label=str(label))
    return dot.source


def to_text(graph, keep=None, props=()):
    ids, edges = _selection(graph, keep)
    states = [(sid, graph.flag(sid), ' '.join(sorted(str(p) for p in graph.labels(sid, props))),
               str(graph.term(sid))) for sid in ids]
    return '\n\n'.join([
        tabulate(states, headers=['id', 'flag', 'labels', 'term']),
        tabulate([(a, b, str(label)) for a, b, label in edges], headers=['from', 'to', 'label']),
    ])
