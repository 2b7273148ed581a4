from tests.common import TestCase, corpus_module, module_from_text

from stratmc import strategy as st
from stratmc.errors import (AmbiguousOverload, CyclicImport, DuplicateDeclaration, MissingModule,
                            PropSortMismatch, SpecSyntaxError, UnboundVariable, UnknownRuleLabel,
                            UnknownStrategy)
from stratmc.ltl import Always, And, Eventually, Not, Or, Prop, Until, atoms
from stratmc.module import flatten, load_file, parse_file, resolve_spec_path, select_module
from stratmc.parser import parse_formula, parse_formula_term, parse_strategy, parse_term, tokenize


def texts(source):
    return [token.text for token in tokenize(source)]


class TestTokenizer(TestCase):
    def test_punctuation(self):
        expected = ['eq', 'f', '(', 'X', ',', 'Y', ')', '=', '[]', '(', 'X', ')', '.']
        actual = texts('eq f(X, Y) = [](X) .')

        self.assertEqual(actual, expected)

    def test_such_that(self):
        self.assertEqual(texts('match X s.t. Y'), ['match', 'X', 's.t.', 'Y'])

    def test_comments(self):
        self.assertEqual(texts('sort A . *** the sort\n--- nothing\nsort B .'),
                         ['sort', 'A', '.', 'sort', 'B', '.'])

    def test_final_period(self):
        self.assertEqual(texts('sort A.'), ['sort', 'A', '.'])

    def test_positions(self):
        tokens = tokenize('fmod A is\n  sort B .')

        self.assertEqual((tokens[3].line, tokens[3].column), (2, 3))


class TestModules(TestCase):
    def test_corpus_modules(self):
        names = [m.name for m in load_file('philosophers')]

        self.assertEqual(names, ['PHILOSOPHERS-DINNER-BASE', 'PHILOSOPHERS-DINNER',
                                 'DINNER-STRAT', 'DINNER-PREDS', 'DINNER-SCHECK'])

    def test_select_module(self):
        modules = load_file('scheduling')

        self.assertEqual(select_module(modules).name, 'SCHEDULING')
        self.assertEqual(select_module(modules, 'MEMORY').name, 'MEMORY')
        with self.assertRaises(MissingModule):
            select_module(modules, 'NOPE')

    def test_flatten(self):
        modules = load_file('micro')

        flat = flatten('COUNTERS-STRAT', modules)

        self.assertEqual(flat.declarations(), modules[-1].declarations())
        self.assertEqual(flat.labels, ['inc', 'reset', 'advance'])
        self.assertIn('COUNTERS', flat.included)

    def test_bundled_names(self):
        self.assertEqual(resolve_spec_path('micro').name, 'micro.rwspec')
        with self.assertRaises(FileNotFoundError):
            resolve_spec_path('no-such-example')

    def test_unknown_keyword(self):
        with self.assertRaises(SpecSyntaxError) as cm:
            parse_file('fmod A is\n  foo B .\nendfm')

        self.assertEqual((cm.exception.line, cm.exception.column), (2, 3))
        self.assertEqual(cm.exception.token, 'foo')

    def test_missing_period(self):
        with self.assertRaises(SpecSyntaxError):
            parse_file('fmod A is sort B endfm')

    def test_wrong_terminator(self):
        with self.assertRaises(SpecSyntaxError):
            parse_file('fmod A is sort B . endm')

    def test_cyclic_import(self):
        text = '''
        fmod A is protecting B . endfm
        fmod B is protecting A . endfm
        '''
        with self.assertRaises(CyclicImport):
            parse_file(text)

    def test_missing_import(self):
        with self.assertRaises(MissingModule):
            parse_file('fmod A is including NOPE . endfm')

    def test_duplicate_operator(self):
        text = '''
        fmod A is
          sort S .
          op a : -> S .
          op a : -> S .
        endfm
        '''
        with self.assertRaises(DuplicateDeclaration):
            parse_file(text)

    def test_unbound_variable(self):
        text = '''
        mod A is
          sort S .
          ops a b : -> S .
          vars X Y : S .
          rl [r] : X => Y .
        endm
        '''
        with self.assertRaises(UnboundVariable):
            parse_file(text)

    def test_nonexec_rejected(self):
        text = '''
        mod A is
          sort S .
          ops a b : -> S .
          rl [r] : a => b [nonexec] .
        endm
        '''
        with self.assertRaises(SpecSyntaxError):
            parse_file(text)

    def test_unlabeled_rule(self):
        text = '''
        mod A is
          sort S .
          ops a b : -> S .
          rl a => b .
        endm
        '''
        module = module_from_text(text)

        self.assertEqual(module.rules[0].name, 'unlabeled')
        self.assertEqual(module.labels, [])

    def test_variable_constant_clash(self):
        text = '''
        fmod A is
          sort S .
          op a : -> S .
          var a : S .
        endfm
        '''
        module = module_from_text(text)

        with self.assertRaises(AmbiguousOverload):
            parse_term('a', module)

    def test_undeclared_strategy_definition(self):
        text = '''
        smod A is
          sort S .
          sd go := idle .
        endsm
        '''
        with self.assertRaises(SpecSyntaxError):
            parse_file(text)


class TestStrategyParser(TestCase):
    def setUp(self):
        super().setUp()
        self.module = corpus_module('philosophers')

    def test_precedence(self):
        s = parse_strategy('left ; right | release', self.module)

        self.assertIsInstance(s, st.Union)
        self.assertIsInstance(s.items[0], st.Seq)
        self.assertEqual(str(s), 'left ; right | release')

    def test_parentheses(self):
        s = parse_strategy('(left | right) ; release', self.module)

        self.assertIsInstance(s, st.Seq)
        self.assertEqual(str(s), '(left | right) ; release')

    def test_rule_application(self):
        s = parse_strategy('left[Id <- 0]', self.module)

        self.assertEqual(s.label, 'left')
        self.assertEqual(str(s), 'left[Id <- 0]')

    def test_conditional(self):
        s = parse_strategy('all ? free : idle', self.module)

        self.assertIsInstance(s, st.Conditional)
        self.assertIsNone(s.cond.label)
        self.assertEqual(s.then, st.Call('free', ()))
        self.assertEqual(s.otherwise, st.IDLE)

    def test_calls(self):
        s = parse_strategy('turns(0, 5)', self.module)

        self.assertEqual(s.name, 'turns')
        self.assertEqual(len(s.args), 2)

    def test_postfix_and_derived(self):
        s = parse_strategy('try(release) ; left *', self.module)

        self.assertIsInstance(s.items[0], st.Try)
        self.assertIsInstance(s.items[1], st.Star)
        self.assertFalse(st.is_core(s))
        self.assertTrue(st.is_core(st.desugar(s)))

    def test_matchrew(self):
        s = parse_strategy('matchrew T:Table s.t. table(L:List) := T:Table by T:Table using left',
                           self.module)

        self.assertIsInstance(s, st.Matchrew)
        self.assertEqual(s.mode, 'match')
        self.assertEqual(len(s.condition), 1)

    def test_unknown_label(self):
        with self.assertRaises(UnknownRuleLabel):
            parse_strategy('jump', self.module)

    def test_unknown_strategy(self):
        with self.assertRaises(UnknownStrategy):
            parse_strategy('jump(1)', self.module)

    def test_mixed_conditionals(self):
        with self.assertRaises(SpecSyntaxError):
            parse_strategy('left ? right : release or-else idle', self.module)


class TestFormulaParser(TestCase):
    def setUp(self):
        super().setUp()
        self.module = corpus_module('micro')

    def prop(self, text):
        return Prop(parse_term(text, self.module))

    def test_unary(self):
        expected = Always(Eventually(self.prop('at(0)')))
        actual = parse_formula('[] <> at(0)', self.module)

        self.assertEqual(actual, expected)

    def test_formula_term(self):
        term = parse_formula_term('[] <> at(0)', self.module)

        self.assertEqual(str(term), '[](<>(at(0)))')

    def test_precedence(self):
        expected = Or(And(self.prop('at(1)'), self.prop('at(2)')), self.prop('at(0)'))
        actual = parse_formula('at(0) \\/ at(1) /\\ at(2)', self.module)

        self.assertEqual(actual, expected)

    def test_weak_until(self):
        a, b = self.prop('at(0)'), self.prop('at(1)')

        actual = parse_formula('at(0) W at(1)', self.module)

        self.assertEqual(actual, Or(Until(a, b), Always(a)))

    def test_builders_are_reduced(self):
        module = corpus_module('scheduling')

        formula = parse_formula('onlyOne(2)', module)

        self.assertIsInstance(formula, Always)
        self.assertIsInstance(formula.operand, Not)
        self.assertEqual({str(p) for p in atoms(formula)}, {'inCrit(1)', 'inCrit(2)'})

    def test_not_a_formula(self):
        with self.assertRaises(PropSortMismatch):
            parse_formula('<> 3', self.module)

    def test_nonground_proposition(self):
        with self.assertRaises(PropSortMismatch):
            parse_formula('<> at(N:Nat)', self.module)
