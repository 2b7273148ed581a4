from tests.common import TestCase, corpus_module, module_from_text

from stratmc.errors import NoSort, SpecSyntaxError, UnknownOperator
from stratmc.parser import parse_term
from stratmc.term import Literal, Substitution, Variable, variables

CHAIN = '''
fmod CHAIN is
  sorts A B C D .
  subsorts A < B < C .
endfm
'''


class TestSignature(TestCase):
    def test_subsort_closure(self):
        sig = module_from_text(CHAIN).signature

        self.assertTrue(sig.leq('A', 'C'))
        self.assertTrue(sig.leq('B', 'B'))
        self.assertFalse(sig.leq('C', 'A'))
        self.assertFalse(sig.leq('A', 'D'))
        self.assertTrue(sig.leq('NzNat', 'Int'))

    def test_kinds(self):
        sig = module_from_text(CHAIN).signature

        self.assertEqual(sig.kind('A'), '[C]')
        self.assertEqual(sig.kind('D'), '[D]')
        self.assertTrue(sig.same_kind('A', 'C'))
        self.assertFalse(sig.same_kind('A', 'D'))

    def test_cyclic_subsorts(self):
        text = '''
        fmod CYCLE is
          sorts A B .
          subsort A < B .
          subsort B < A .
        endfm
        '''
        with self.assertRaises(SpecSyntaxError):
            module_from_text(text)

    def test_literal_sorts(self):
        module = corpus_module('micro')

        self.assertEqual(parse_term('0', module).sort, 'Nat')
        self.assertEqual(parse_term('3', module).sort, 'NzNat')
        self.assertEqual(parse_term('-2', module).sort, 'Int')
        self.assertEqual(parse_term("'mutex", module).sort, 'Qid')


class TestCanonicalForm(TestCase):
    def test_assoc_flattening(self):
        module = corpus_module('philosophers')

        expected = parse_term('list(fork, none, fork)', module)
        actual = parse_term('list(list(fork, none), fork)', module)

        self.assertEqual(actual, expected)
        self.assertEqual(len(actual.args), 3)

    def test_identity_removal(self):
        module = corpus_module('philosophers')

        self.assertEqual(parse_term('list(fork, list(empty, fork))', module),
                         parse_term('list(fork, fork)', module))
        self.assertEqual(parse_term('list(empty, fork)', module), parse_term('fork', module))
        self.assertEqual(parse_term('list(empty, empty)', module), parse_term('empty', module))

    def test_comm_ordering(self):
        module = corpus_module('scheduling')

        a = parse_term("mem(cell('b, 1), cell('a, 2))", module)
        b = parse_term("mem(cell('a, 2), cell('b, 1))", module)

        self.assertEqual(a, b)
        self.assertEqual(hash(a), hash(b))
        self.assertEqual(str(a), "mem(cell('a, 2), cell('b, 1))")

    def test_sort_of_application(self):
        module = corpus_module('philosophers')

        self.assertEqual(parse_term('phil(none, 0, fork)', module).sort, 'Phil')
        self.assertEqual(parse_term('list(fork, phil(none, 0, fork))', module).sort, 'List')
        self.assertEqual(parse_term('table(fork)', module).sort, 'Table')

    def test_no_sort(self):
        module = corpus_module('philosophers')

        with self.assertRaises(NoSort):
            parse_term('phil(fork, fork, fork)', module)

    def test_unknown_operator(self):
        module = corpus_module('philosophers')

        with self.assertRaises(UnknownOperator):
            parse_term('phil(fork)', module)

    def test_print_reparses(self):
        module = corpus_module('philosophers')
        term = self.term(module, 'initial(5)')

        self.assertEqual(len(term.args[0].args), 10)
        self.assertEqual(parse_term(str(term), module), term)

    def test_print_variables(self):
        module = corpus_module('philosophers')
        term = parse_term('phil(X:Obj, Id:Nat, none)', module)

        self.assertEqual(str(term), 'phil(X:Obj, Id:Nat, none)')
        self.assertEqual(parse_term(str(term), module), term)
        self.assertEqual({v.name for v in variables(term)}, {'X', 'Id'})


class TestSubstitution(TestCase):
    def setUp(self):
        super().setUp()
        self.n = Variable('N', 'Nat')
        self.m = Variable('M', 'Nat')
        self.one = Literal(1, 'NzNat')
        self.two = Literal(2, 'NzNat')

    def test_extend_and_update(self):
        s = Substitution({self.n: self.one})

        extended = s.extend(self.m, self.two)
        self.assertEqual(len(extended), 2)
        self.assertEqual(len(s), 1)

        updated = extended.update({self.n: self.two})
        self.assertEqual(updated[self.n], self.two)
        self.assertEqual(updated[self.m], self.two)

    def test_restrict_and_without(self):
        s = Substitution({self.n: self.one, self.m: self.two})

        self.assertEqual(s.restrict({self.n}), Substitution({self.n: self.one}))
        self.assertEqual(s.without({self.n}), Substitution({self.m: self.two}))
        self.assertIs(s.by_name('M'), self.m)

    def test_hashable(self):
        a = Substitution({self.n: self.one})
        b = Substitution({self.n: self.one})

        self.assertEqual(a, b)
        self.assertEqual(len({a, b}), 1)

    def test_apply(self):
        module = corpus_module('micro')
        pattern = parse_term('pair(c(N:Nat), c(M:Nat))', module)
        n = Variable('N', 'Nat')
        m = Variable('M', 'Nat')

        actual = Substitution({n: self.one, m: self.two}).apply(pattern)

        self.assertEqual(actual, parse_term('pair(c(1), c(2))', module))
