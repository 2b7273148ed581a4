from tests.common import TestCase, corpus_module

from stratmc.ltl import (FALSE, TRUE, Always, And, Eventually, Implies, Next, Not, Or, Prop, Release,
                         Until, atoms, eval_on_lasso, is_normal, negate_and_normalize, nnf, size,
                         to_string)
from stratmc.parser import parse_formula

p = Prop('p')
q = Prop('q')


class TestNormalForm(TestCase):
    def test_eventually(self):
        self.assertEqual(nnf(Eventually(p)), Until(TRUE, p))

    def test_always(self):
        self.assertEqual(nnf(Always(p)), Release(FALSE, p))

    def test_negated_always(self):
        self.assertEqual(negate_and_normalize(Always(p)), Until(TRUE, Not(p)))

    def test_de_morgan(self):
        expected = Or(Not(p), And(q, Not(p)))
        actual = nnf(Not(And(p, Or(Not(q), p))))

        self.assertEqual(actual, expected)

    def test_implication(self):
        self.assertEqual(nnf(Implies(p, q)), Or(Not(p), q))

    def test_next_and_release(self):
        self.assertEqual(nnf(Not(Next(p))), Next(Not(p)))
        self.assertEqual(nnf(Not(Release(p, q))), Until(Not(p), Not(q)))
        self.assertEqual(nnf(Not(TRUE)), FALSE)

    def test_is_normal(self):
        self.assertTrue(is_normal(Until(TRUE, Not(p))))
        self.assertFalse(is_normal(Always(p)))
        self.assertFalse(is_normal(Not(Next(p))))
        self.assertFalse(is_normal(Implies(p, q)))
        for f in [Always(Eventually(p)), Not(Until(p, Next(q))), Implies(Always(p), q)]:
            self.assertTrue(is_normal(nnf(f)))


class TestFormulaUtilities(TestCase):
    def test_atoms(self):
        self.assertEqual(atoms(Until(p, Or(q, Not(p)))), {'p', 'q'})
        self.assertEqual(atoms(TRUE), set())

    def test_size(self):
        self.assertEqual(size(p), 1)
        self.assertEqual(size(Always(Eventually(p))), 3)
        self.assertEqual(size(Until(p, And(q, TRUE))), 5)

    def test_to_string_reparses(self):
        module = corpus_module('micro')
        for text in ['[] (at(0) -> <> at(1))',
                     'at(0) U (at(1) R at(2))',
                     'O ~ at(0)',
                     '<> True']:
            formula = parse_formula(text, module)

            self.assertEqual(parse_formula(to_string(formula), module), formula, text)

    def test_to_string(self):
        self.assertEqual(to_string(Always(Eventually(p))), '[] (<> (p))')
        self.assertEqual(to_string(Until(p, FALSE)), '(p U False)')


class TestLassoEvaluation(TestCase):
    def test_infinitely_often(self):
        self.assertTrue(eval_on_lasso(Always(Eventually(p)), [set()], [{'p'}, set()]))

    def test_eventually_always(self):
        self.assertFalse(eval_on_lasso(Eventually(Always(p)), [set()], [{'p'}, set()]))
        self.assertTrue(eval_on_lasso(Eventually(Always(p)), [set(), {'q'}], [{'p'}]))

    def test_next(self):
        self.assertTrue(eval_on_lasso(Next(p), [set(), {'p'}], [set()]))
        self.assertFalse(eval_on_lasso(Next(p), [{'p'}], [set()]))

    def test_next_wraps_into_cycle(self):
        self.assertTrue(eval_on_lasso(Next(Next(p)), [set()], [{'p'}]))
        self.assertFalse(eval_on_lasso(Next(Next(p)), [set()], [{'p'}, set()]))

    def test_until(self):
        self.assertTrue(eval_on_lasso(Until(p, q), [{'p'}, {'p'}], [{'q'}]))
        self.assertFalse(eval_on_lasso(Until(p, q), [{'p'}], [{'p'}]))
        self.assertFalse(eval_on_lasso(Until(p, q), [set()], [{'q'}]))

    def test_release(self):
        self.assertTrue(eval_on_lasso(Release(p, q), [], [{'q'}]))
        self.assertTrue(eval_on_lasso(Release(p, q), [{'q'}, {'p', 'q'}], [set()]))
        self.assertFalse(eval_on_lasso(Release(p, q), [{'q'}], [set()]))

    def test_negation_agrees(self):
        f = Until(p, Always(q))
        prefix, cycle = [{'p'}], [{'q'}, {'p', 'q'}]

        self.assertEqual(eval_on_lasso(Not(f), prefix, cycle), not eval_on_lasso(f, prefix, cycle))
        self.assertEqual(eval_on_lasso(nnf(Not(f)), prefix, cycle),
                         eval_on_lasso(Not(f), prefix, cycle))

    def test_empty_cycle(self):
        with self.assertRaises(ValueError):
            eval_on_lasso(p, [{'p'}], [])
