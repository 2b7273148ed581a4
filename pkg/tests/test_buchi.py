from tests.common import TestCase

from stratmc.buchi import accepts_lasso, to_buchi
from stratmc.ltl import (FALSE, TRUE, Always, And, Eventually, Implies, Next, Not, Or, Prop, Release,
                         Until, eval_on_lasso, nnf)

p = Prop('p')
q = Prop('q')

LASSOS = [
    ([], [set()]),
    ([], [{'p'}]),
    ([{'p'}], [{'q'}]),
    ([set()], [{'p'}, set()]),
    ([{'p'}, {'p', 'q'}], [set()]),
    ([{'q'}], [{'p'}, {'q'}]),
]


class TestTranslation(TestCase):
    def test_true(self):
        automaton = to_buchi(TRUE)

        self.assertEqual(len(automaton), 1)
        self.assertEqual(automaton.initial, [0])
        self.assertEqual(list(automaton.transitions()), [(0, (frozenset(), frozenset()), 0)])
        self.assertTrue(accepts_lasso(automaton, [], [{'p'}]))

    def test_false(self):
        automaton = to_buchi(FALSE)

        self.assertEqual(len(automaton), 0)
        self.assertFalse(accepts_lasso(automaton, [], [set()]))

    def test_requires_normal_form(self):
        with self.assertRaises(ValueError):
            to_buchi(Always(p))

    def test_proposition_guards(self):
        automaton = to_buchi(p)

        self.assertTrue(automaton.initial_for({'p'}))
        self.assertEqual(automaton.initial_for({'q'}), [])

    def test_negated_proposition(self):
        automaton = to_buchi(Not(p))

        self.assertTrue(accepts_lasso(automaton, [{'q'}], [{'p'}]))
        self.assertFalse(accepts_lasso(automaton, [{'p'}], [set()]))


class TestAcceptance(TestCase):
    def assertAgrees(self, formula):
        automaton = to_buchi(nnf(formula))
        for prefix, cycle in LASSOS:
            expected = eval_on_lasso(formula, prefix, cycle)
            actual = accepts_lasso(automaton, prefix, cycle)

            self.assertEqual(actual, expected, (formula, prefix, cycle))

    def test_until(self):
        self.assertAgrees(Until(p, q))

    def test_release(self):
        self.assertAgrees(Release(p, q))

    def test_infinitely_often(self):
        self.assertAgrees(Always(Eventually(p)))

    def test_eventually_always(self):
        self.assertAgrees(Eventually(Always(p)))

    def test_next(self):
        self.assertAgrees(Next(Or(p, Next(q))))

    def test_nested_untils(self):
        self.assertAgrees(Until(Eventually(q), Always(p)))
        self.assertAgrees(Always(Or(Not(p), Eventually(q))))

    def test_negated_liveness(self):
        self.assertAgrees(Not(Always(Eventually(p))))

    def test_trivial_eventualities(self):
        for formula in [Eventually(TRUE), Always(Eventually(TRUE)), Not(Always(FALSE)),
                        Eventually(Always(FALSE)), Until(p, TRUE), Not(Eventually(Always(FALSE)))]:
            with self.subTest(formula=formula):
                self.assertAgrees(formula)

    def test_infinitely_often_true_accepts(self):
        automaton = to_buchi(nnf(Always(Eventually(TRUE))))

        self.assertTrue(automaton.accepting)
        self.assertTrue(accepts_lasso(automaton, [], [set()]))


def _conjunction(formulae):
    result = formulae[0]
    for f in formulae[1:]:
        result = And(result, f)
    return result


class TestLargeFormulae(TestCase):
    def setUp(self):
        super().setUp()
        used = _conjunction([Eventually(Prop('u{}'.format(i))) for i in range(5)])
        eaten = _conjunction([Eventually(Prop('e{}'.format(i))) for i in range(5)])
        self.fairness = Implies(Always(used), Always(eaten))

    def test_fairness_translation(self):
        automaton = to_buchi(nnf(Not(self.fairness)))

        everyone = {'u{}'.format(i) for i in range(5)}
        fair = [everyone | {'e{}'.format(i)} for i in range(5)]

        self.assertTrue(accepts_lasso(automaton, [], [everyone]))
        self.assertFalse(accepts_lasso(automaton, [], fair))

    def test_translation_is_repeatable(self):
        first = to_buchi(nnf(Not(self.fairness)))
        second = to_buchi(nnf(Not(self.fairness)))

        self.assertEqual(list(first.transitions()), list(second.transitions()))
        self.assertEqual(first.initial, second.initial)
        self.assertEqual(first.accepting, second.accepting)
