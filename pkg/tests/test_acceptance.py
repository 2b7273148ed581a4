import os
import subprocess
import sys
from pathlib import Path

from tests.common import TestCase, corpus_module

from stratmc.bin.run_battery import REFUTED, SATISFIED, load_battery, run_check
from stratmc.checker import model_check
from stratmc.engine import SOLUTION, EngineConfig, StrategyEngine
from stratmc.model import ModelGraph, search_normal_forms
from stratmc.parser import parse_term

EXPERIMENTS_DIR = Path(__file__).resolve().parent.parent / 'experiments'


class TestBatteries(TestCase):
    def run_battery(self, name):
        for check in load_battery(EXPERIMENTS_DIR / (name + '.json')):
            with self.subTest(term=check['term'], strategy=check.get('strategy'),
                              formula=check['formula']):
                verdict, states, _ = run_check(check)

                self.assertEqual(verdict, check['expected'])
                self.assertGreater(states, 0)

    def test_philosophers(self):
        self.run_battery('philosophers')

    def test_scheduling(self):
        self.run_battery('scheduling')

    def test_verdict_names(self):
        for path in EXPERIMENTS_DIR.glob('*.json'):
            for check in load_battery(path):
                self.assertIn(check['expected'], (SATISFIED, REFUTED))


class TestPhilosophers(TestCase):
    def setUp(self):
        super().setUp()
        self.module = corpus_module('philosophers')

    def test_uncontrolled_deadlocks(self):
        forms, states = search_normal_forms(self.module, parse_term('initial', self.module))

        self.assertEqual(states, 243)
        self.assertEqual(len(forms), 2)

    def test_parity_never_finishes(self):
        engine = StrategyEngine(self.module)

        solutions = list(engine.srewrite(parse_term('initial', self.module),
                                         self.strategy(self.module, 'parity')))

        self.assertEqual(solutions, [])


class TestMonotonicity(TestCase):
    '''Safety properties of the uncontrolled system hold under every strategy.'''

    def assertMonotone(self, module, term, formula, strategies):
        term = parse_term(term, module)
        formula = self.formula(module, formula)

        self.assertTrue(model_check(module, term, formula).holds)
        for text in strategies:
            with self.subTest(strategy=text):
                result = model_check(module, term, formula, self.strategy(module, text))

                self.assertTrue(result.holds)

    def test_mutual_exclusion(self):
        self.assertMonotone(corpus_module('scheduling'), 'initial(4, p)', 'onlyOne(4)',
                            ['blocked', 'roundRobin(nil)', 'roundRobin(nil, 5, 5)'])

    def test_counter_range(self):
        self.assertMonotone(corpus_module('micro'), 'c(0)', '[] (at(0) \\/ at(1) \\/ at(2))',
                            ['count', 'upTo(2)', 'inc *'])


class TestMatchrewBias(TestCase):
    def test_verdicts_independent_of_bias(self):
        module = corpus_module('micro')
        term = parse_term('pair(c(0), c(0))', module)
        for text in ['[] <> leftAt(0)', '[] <> rightAt(2)', '<> [] rightAt(1)']:
            formula = self.formula(module, text)
            verdicts = {model_check(module, term, formula, self.strategy(module, 'loop'),
                                    EngineConfig(biased=biased)).holds
                        for biased in (True, False)}

            self.assertEqual(len(verdicts), 1, text)


class TestVerdictCoherence(TestCase):
    def test_formula_and_negation_not_both_satisfied(self):
        for path in sorted(EXPERIMENTS_DIR.glob('*.json')):
            for check in load_battery(path):
                negated = dict(check, formula='~ ({})'.format(check['formula']))
                with self.subTest(term=check['term'], strategy=check.get('strategy'),
                                  formula=check['formula']):
                    verdict, _, _ = run_check(check)
                    opposite, _, _ = run_check(negated)

                    self.assertFalse(verdict == opposite == SATISFIED)


class TestStateCounts(TestCase):
    def find(self, strategy, term):
        checks = load_battery(EXPERIMENTS_DIR / 'scheduling.json')
        return next(c for c in checks if c.get('strategy') == strategy and c['term'] == term)

    def test_round_robin_with_quanta(self):
        verdict, states, _ = run_check(self.find('roundRobin(nil, 5, 5)', 'initial(4, p)'))

        self.assertEqual(verdict, SATISFIED)
        self.assertGreaterEqual(states, 68)
        self.assertLessEqual(states, 113)

    def test_blocked_with_io(self):
        verdict, states, _ = run_check(self.find('blocked', 'initial(4, pIo)'))

        self.assertEqual(verdict, REFUTED)
        self.assertLessEqual(states, 22)

    def test_blocked_with_io_full_model(self):
        module = corpus_module('scheduling')
        graph = ModelGraph(module, parse_term('initial(4, pIo)', module),
                           self.strategy(module, 'blocked')).explore()

        self.assertEqual(len(graph), 21)


DETERMINISM_SCRIPT = '''
from stratmc.checker import model_check
from stratmc.module import load_module
from stratmc.parser import parse_formula, parse_strategy, parse_term

module = load_module('philosophers')
result = model_check(module, parse_term('initial', module),
                     parse_formula('[] allUsed(5) -> [] allEat(5)', module),
                     parse_strategy('parity', module))
print(result.holds, result.states, result.automaton_states)
print(result.counterexample.to_json())
for source, target, label in result.graph.edges():
    print(source, target, label)
'''


class TestDeterminism(TestCase):
    def run_with_seed(self, seed):
        env = dict(os.environ, PYTHONHASHSEED=seed,
                   PYTHONPATH=os.pathsep.join(p for p in sys.path if p))
        return subprocess.run([sys.executable, '-c', DETERMINISM_SCRIPT], env=env,
                              stdout=subprocess.PIPE, stderr=subprocess.PIPE,
                              universal_newlines=True)

    def test_same_output_across_hash_seeds(self):
        runs = [self.run_with_seed(seed) for seed in ('0', '3', '9')]

        for run in runs:
            self.assertEqual(run.returncode, 0, run.stderr)
        self.assertTrue(runs[0].stdout.startswith('False '))
        self.assertEqual(runs[0].stdout, runs[1].stdout)
        self.assertEqual(runs[0].stdout, runs[2].stdout)


def prefix_paths(graph, depth):
    '''Sequences of `(label, term)` along the paths from the initial state.'''
    found = set()
    frontier = [(graph.initial, ((None, str(graph.term(graph.initial))),))]
    while frontier:
        sid, path = frontier.pop()
        found.add(path)
        if len(path) > depth:
            continue
        for target, label in graph.expand(sid):
            if label == SOLUTION and target == sid:
                continue
            frontier.append((target, path + ((label.name, str(graph.term(target))),)))
    return found


class TestBiasedInterleavings(TestCase):
    def test_biased_paths_among_unbiased(self):
        module = corpus_module('micro')
        for a in range(3):
            for b in range(3):
                term = parse_term('pair(c({}), c({}))'.format(a, b), module)
                for text in ('bothOnce', 'both', 'loop'):
                    with self.subTest(term=str(term), strategy=text):
                        strategy = self.strategy(module, text)
                        biased = ModelGraph(module, term, strategy).explore()
                        unbiased = ModelGraph(module, term, strategy,
                                              EngineConfig(biased=False)).explore()

                        self.assertLessEqual(prefix_paths(biased, 6), prefix_paths(unbiased, 6))
