from tests.common import TestCase, corpus_module

from stratmc.matching import Matcher
from stratmc.parser import parse_term, stream_of, term_parser
from stratmc.term import Variable


class TestMatcher(TestCase):
    def test_ac_matching(self):
        module = corpus_module('scheduling')
        matcher = Matcher(module.signature)
        pattern = parse_term('soup(proc(I:Pid, R:Program), S:Soup)', module)
        subject = self.term(module, 'initialSoup(3, p)')

        matches = matcher.matches(pattern, subject)

        self.assertEqual(len(matches), 3)
        chosen = sorted(m[Variable('I', 'Pid')].value for m in matches)
        self.assertEqual(chosen, [1, 2, 3])
        for m in matches:
            self.assertEqual(m.apply(pattern), subject)

    def test_ac_identity(self):
        module = corpus_module('scheduling')
        matcher = Matcher(module.signature)
        pattern = parse_term('soup(proc(I:Pid, R:Program), S:Soup)', module)
        subject = parse_term('proc(1, skip)', module)

        (match,) = matcher.matches(pattern, subject)

        self.assertEqual(match[Variable('S', 'Soup')], parse_term('empty', module))

    def test_assoc_segments(self):
        module = corpus_module('philosophers')
        matcher = Matcher(module.signature)
        pattern = parse_term('list(L:List, phil(X:Obj, Id:Nat, Y:Obj), fork)', module)
        subject = self.term(module, 'initialList(3)')

        matches = matcher.matches(pattern, subject)

        self.assertEqual(len(matches), 1)
        self.assertEqual(matches[0][Variable('Id', 'Nat')].value, 2)

    def test_successor_pattern(self):
        module = corpus_module('micro')
        matcher = Matcher(module.signature)
        pattern = parse_term('c(s(N:Nat))', module)

        (match,) = matcher.matches(pattern, parse_term('c(3)', module))
        self.assertEqual(match[Variable('N', 'Nat')].value, 2)

        self.assertEqual(matcher.matches(pattern, parse_term('c(0)', module)), [])

    def test_nonlinear_pattern(self):
        module = corpus_module('micro')
        matcher = Matcher(module.signature)
        pattern = parse_term('pair(A:Counter, A:Counter)', module)

        self.assertEqual(len(matcher.matches(pattern, parse_term('pair(c(1), c(1))', module))), 1)
        self.assertEqual(matcher.matches(pattern, parse_term('pair(c(1), c(2))', module)), [])

    def test_sorted_variable(self):
        module = corpus_module('micro')
        matcher = Matcher(module.signature)
        pattern = parse_term('c(N:NzNat)', module)

        self.assertEqual(matcher.matches(pattern, parse_term('c(0)', module)), [])
        self.assertEqual(len(matcher.matches(pattern, parse_term('c(2)', module))), 1)


class TestMatchModes(TestCase):
    def setUp(self):
        super().setUp()
        self.module = corpus_module('philosophers')
        self.reducer = self.module.reducer()
        self.pattern = parse_term('list(fork, phil(none, Id:Nat, X:Obj))', self.module)

    def test_anywhere_in_table(self):
        subject = self.term(self.module, 'initial(5)')

        matches = self.reducer.match(self.pattern, subject, anywhere=True)

        ids = sorted(s[Variable('Id', 'Nat')].value for s, _ in matches)
        self.assertEqual(ids, [1, 2, 3, 4])

    def test_anywhere_in_rotated_list(self):
        subject = self.term(self.module, 'list(fork, initialList(5))')

        matches = self.reducer.match(self.pattern, subject, anywhere=True)

        self.assertEqual(len(matches), 5)

    def test_contexts_plug_back(self):
        subject = self.term(self.module, 'initial(5)')

        for subst, context in self.reducer.match(self.pattern, subject, anywhere=True):
            self.assertEqual(context.plug(subst.apply(self.pattern)), subject)

    def test_top_only(self):
        subject = self.term(self.module, 'initial(5)')

        self.assertEqual(self.reducer.match(self.pattern, subject), [])

    def test_extension_mode(self):
        subject = self.term(self.module, 'initialList(2)')

        self.assertEqual(self.reducer.match(self.pattern, subject), [])
        self.assertEqual(len(self.reducer.match(self.pattern, subject, ext=True)), 1)

    def test_condition(self):
        subject = self.term(self.module, 'initial(5)')
        fragments = term_parser(self.module).parse_condition(stream_of('divides(2, Id:Nat)'))

        matches = self.reducer.match(self.pattern, subject, fragments, anywhere=True)

        ids = sorted(s[Variable('Id', 'Nat')].value for s, _ in matches)
        self.assertEqual(ids, [2, 4])
