"""
Lexer and recursive-descent parsers for specification files, terms, strategy
expressions and LTL formulae.

Terms use prefix notation only: `f(t1, ..., tn)`, constants, integer and
quoted-identifier literals, declared variables and inline `Name:Sort`
variables. Associative operators accept two or more arguments.
"""

import logging
import re
from dataclasses import dataclass, field

from stratmc import strategy as st
from stratmc.equations import ConditionFragment
from stratmc.errors import (SpecSyntaxError, UnknownOperator, UnknownIdentifier, UnknownSort,
                            AmbiguousOverload, UnknownStrategy, UnknownRuleLabel, NoSort,
                            PropSortMismatch)
from stratmc.ltl import formula_from_term
from stratmc.term import Variable, literal, make, variables

logger = logging.getLogger(__name__)

PUNCTUATION = '()[]{},'
PUNCTUATION_TOKENS = frozenset(PUNCTUATION)
END_OF_INPUT = '<end of input>'

MODULE_KINDS = {
    'fmod': ('functional', 'endfm'),
    'mod': ('system', 'endm'),
    'smod': ('strategy', 'endsm'),
}
END_KEYWORDS = {'endfm', 'endm', 'endsm'}
IMPORT_KEYWORDS = {'protecting', 'including', 'extending', 'pr', 'inc', 'ex'}
STATEMENT_KEYWORDS = {
    'sort', 'sorts', 'subsort', 'subsorts', 'op', 'ops', 'var', 'vars',
    'eq', 'ceq', 'rl', 'crl', 'strat', 'strats', 'sd', 'csd',
} | IMPORT_KEYWORDS

_INTEGER = re.compile(r'-?\d+$')

STRATEGY_KEYWORDS = {'idle', 'fail', 'all', 'top', 'try', 'not', 'test',
                     'match', 'xmatch', 'amatch', 'matchrew', 'xmatchrew', 'amatchrew'}


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


def tokenize(text):
    '''Split specification text into tokens.

    Punctuation characters are tokens on their own, except that an adjacent
    `[` `]` pair is the single token `[]`. Everything else is cut at
    whitespace. A period ending a word is split off (`s.t.` excepted), and
    `***` or `---` start a comment running to the end of the line.
    '''
    tokens = []
    for lineno, line in enumerate(text.splitlines(), 1):
        i, n = 0, len(line)
        while i < n:
            c = line[i]
            if c.isspace():
                i += 1
                continue
            if c in PUNCTUATION:
                if c == '[' and i + 1 < n and line[i + 1] == ']':
                    tokens.append(Token('[]', lineno, i + 1))
                    i += 2
                else:
                    tokens.append(Token(c, lineno, i + 1))
                    i += 1
                continue
            j = i
            while j < n and not line[j].isspace() and line[j] not in PUNCTUATION:
                j += 1
            word = line[i:j]
            if word.startswith('***') or word.startswith('---'):
                break
            if len(word) > 1 and word.endswith('.') and word != 's.t.':
                tokens.append(Token(word[:-1], lineno, i + 1))
                tokens.append(Token('.', lineno, j))
            else:
                tokens.append(Token(word, lineno, i + 1))
            i = j
    return tokens


class TokenStream:
    def __init__(self, tokens):
        self.tokens = list(tokens)
        self.pos = 0

    def peek(self, offset=0):
        i = self.pos + offset
        return self.tokens[i].text if i < len(self.tokens) else END_OF_INPUT

    def at_end(self):
        return self.pos >= len(self.tokens)

    def next(self):
        if self.at_end():
            raise self.error('unexpected end of input')
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def accept(self, text):
        if self.peek() == text:
            self.pos += 1
            return True
        return False

    def expect(self, text):
        if self.peek() != text:
            raise self.error('expected {!r}'.format(text))
        return self.next()

    def expect_end(self):
        if not self.at_end():
            raise self.error('unexpected trailing input')

    def error(self, message):
        if self.at_end():
            last = self.tokens[-1] if self.tokens else Token(END_OF_INPUT, 1, 1)
            return SpecSyntaxError(message, last.line, last.column + len(last.text), END_OF_INPUT)
        token = self.tokens[self.pos]
        return SpecSyntaxError(message, token.line, token.column, token.text)


def stream_of(text):
    return TokenStream(tokenize(text))


# Module structure

@dataclass
class Statement:
    keyword: str
    tokens: list
    start: Token

    def stream(self):
        return TokenStream(self.tokens)


@dataclass
class ModuleSyntax:
    '''A module as written: its header, imports and raw statements.'''
    name: str
    kind: str
    imports: list = field(default_factory=list)
    statements: list = field(default_factory=list)

    def of_kind(self, *keywords):
        return [s for s in self.statements if s.keyword in keywords]


def split_modules(text):
    '''Cut a specification file into modules and period-terminated statements.'''
    stream = stream_of(text)
    modules = []
    while not stream.at_end():
        header = stream.peek()
        if header not in MODULE_KINDS:
            raise stream.error('expected a module header (fmod, mod or smod)')
        stream.next()
        kind, end = MODULE_KINDS[header]
        name = _word(stream, 'module name')
        stream.expect('is')
        syntax = ModuleSyntax(name, kind)
        while True:
            if stream.at_end():
                raise stream.error('missing {!r} for module {}'.format(end, name))
            if stream.peek() in END_KEYWORDS:
                if stream.peek() != end:
                    raise stream.error('module {} must end with {!r}'.format(name, end))
                stream.next()
                break
            keyword = stream.next()
            if keyword.text not in STATEMENT_KEYWORDS:
                stream.pos -= 1
                raise stream.error('unknown declaration keyword')
            body = _statement_body(stream)
            if keyword.text in IMPORT_KEYWORDS:
                if len(body) != 1:
                    raise SpecSyntaxError('import expects a single module name',
                                          keyword.line, keyword.column, keyword.text)
                syntax.imports.append(body[0].text)
            else:
                syntax.statements.append(Statement(keyword.text, body, keyword))
        logger.debug('read module %s with %d statements', name, len(syntax.statements))
        modules.append(syntax)
    return modules


def _statement_body(stream):
    body = []
    depth = 0
    while True:
        if stream.at_end():
            raise stream.error('missing final period')
        token = stream.next()
        if token.text in '([{':
            depth += 1
        elif token.text in ')]}':
            depth -= 1
        elif token.text == '.' and depth == 0:
            return body
        body.append(token)


def _word(stream, what):
    token = stream.next()
    if token.text in PUNCTUATION_TOKENS or token.text == '.':
        stream.pos -= 1
        raise stream.error('expected {}'.format(what))
    return token.text


# Declarations

def sort_names(statement):
    stream = statement.stream()
    names = []
    while not stream.at_end():
        names.append(_word(stream, 'sort name'))
    if not names:
        raise stream.error('expected sort names')
    return names


def subsort_chain(statement):
    '''Groups of a declaration `A B < C < D`; each group is below the next.'''
    groups = [[]]
    stream = statement.stream()
    while not stream.at_end():
        if stream.accept('<'):
            groups.append([])
        else:
            groups[-1].append(_word(stream, 'sort name'))
    if len(groups) < 2 or any(not g for g in groups):
        raise SpecSyntaxError('malformed subsort declaration', statement.start.line,
                              statement.start.column, statement.keyword)
    return groups


@dataclass
class OpDeclaration:
    names: list
    arg_sorts: list
    result: str
    attributes: dict


def op_declaration(statement):
    '''Parse `op NAMES : SORTS -> SORT [ATTRS]`.'''
    stream = statement.stream()
    names = []
    while stream.peek() != ':':
        names.append(_word(stream, 'operator name'))
    if not names:
        raise stream.error('expected an operator name')
    stream.expect(':')
    arg_sorts = []
    while stream.peek() != '->':
        arg_sorts.append(_word(stream, 'argument sort'))
    stream.expect('->')
    result = _word(stream, 'result sort')
    attributes = _op_attributes(stream) if stream.accept('[') else {}
    stream.expect_end()
    if statement.keyword == 'op' and len(names) > 1:
        raise SpecSyntaxError('use ops to declare several operators', statement.start.line,
                              statement.start.column, statement.keyword)
    return OpDeclaration(names, arg_sorts, result, attributes)


_FLAG_ATTRIBUTES = {'assoc', 'comm', 'ctor', 'frozen', 'builtin'}


def _op_attributes(stream):
    attributes = {}
    while not stream.accept(']'):
        word = stream.peek()
        if word in _FLAG_ATTRIBUTES:
            stream.next()
            attributes[word] = True
        elif word == 'id:':
            stream.next()
            attributes['id'] = _term_tokens(stream)
        elif word == 'id' and stream.peek(1) == '(':
            stream.next()
            stream.next()
            attributes['id'] = _term_tokens(stream)
            stream.expect(')')
        elif word == 'prec':
            stream.next()
            stream.next()
        elif word == 'gather':
            stream.next()
            _term_tokens(stream)
        else:
            raise stream.error('unsupported operator attribute')
    return attributes


def _term_tokens(stream):
    '''Consume the tokens of one prefix term without interpreting them.'''
    tokens = [stream.next()]
    if stream.peek() == '(':
        depth = 0
        while True:
            token = stream.next()
            tokens.append(token)
            if token.text == '(':
                depth += 1
            elif token.text == ')':
                depth -= 1
                if depth == 0:
                    break
    return tokens


def var_declaration(statement):
    stream = statement.stream()
    names = []
    while stream.peek() != ':':
        names.append(_word(stream, 'variable name'))
    stream.expect(':')
    sort = _word(stream, 'variable sort')
    stream.expect_end()
    if not names:
        raise stream.error('expected variable names')
    return names, sort


def strat_declaration(statement):
    '''Parse `strat NAMES : SORTS @ SORT`; the colon may be left out without parameters.'''
    stream = statement.stream()
    names = []
    while stream.peek() not in (':', '@'):
        names.append(_word(stream, 'strategy name'))
    arg_sorts = []
    if stream.accept(':'):
        while stream.peek() != '@':
            arg_sorts.append(_word(stream, 'parameter sort'))
    stream.expect('@')
    subject = _word(stream, 'subject sort')
    if stream.accept('['):
        while not stream.accept(']'):
            stream.next()
    stream.expect_end()
    if not names:
        raise stream.error('expected a strategy name')
    return names, arg_sorts, subject


def statement_attributes(stream):
    '''Attributes of equations and rules; returns the set of flags.'''
    flags = set()
    if stream.accept('['):
        while not stream.accept(']'):
            word = stream.peek()
            if word in ('owise', 'otherwise'):
                flags.add('owise')
            elif word == 'nonexec':
                raise stream.error('nonexec statements are not supported')
            elif word == 'label':
                stream.next()
            else:
                raise stream.error('unsupported statement attribute')
            stream.next()
    return flags


# Terms

class TermParser:
    '''Parses prefix terms against a signature and a table of variables.'''

    def __init__(self, signature, variables=None):
        self.signature = signature
        self.variables = variables or {}

    def parse(self, stream):
        token = stream.next()
        text = token.text
        if text in PUNCTUATION_TOKENS or text == '.':
            stream.pos -= 1
            raise stream.error('expected a term')
        if stream.peek() == '(':
            stream.next()
            args = [self.parse(stream)]
            while stream.accept(','):
                args.append(self.parse(stream))
            stream.expect(')')
            return self._apply(token, args)
        if _INTEGER.match(text):
            return literal(self.signature, int(text))
        if text.startswith("'") and len(text) > 1:
            return literal(self.signature, text)
        if ':' in text[1:-1]:
            name, sort = text.split(':', 1)
            try:
                self.signature.check_sort(sort)
            except UnknownSort as e:
                raise SpecSyntaxError(str(e), token.line, token.column, text)
            return Variable(name, sort)
        var = self.variables.get(text)
        symbol = self.signature.symbols.get((text, 0))
        if var is not None and symbol is not None:
            raise AmbiguousOverload(text, [var, symbol])
        if var is not None:
            return var
        if symbol is not None:
            return make(symbol, ())
        raise UnknownIdentifier('unknown identifier {!r} at line {}, column {}'.format(
            text, token.line, token.column))

    def _apply(self, token, args):
        symbol = self.signature.lookup(token.text, len(args))
        if symbol is None:
            raise UnknownOperator('no operator {}/{} (line {}, column {})'.format(
                token.text, len(args), token.line, token.column))
        try:
            return make(symbol, args)
        except NoSort as e:
            raise NoSort('{} (line {}, column {})'.format(e, token.line, token.column))

    def parse_condition(self, stream):
        '''Fragments separated by `/\\`; a bare term abbreviates `t = true`.'''
        fragments = [self._fragment(stream)]
        while stream.accept('/\\'):
            fragments.append(self._fragment(stream))
        return tuple(fragments)

    def _fragment(self, stream):
        left = self.parse(stream)
        if stream.accept('='):
            return ConditionFragment('eq', left, self.parse(stream))
        if stream.accept(':='):
            return ConditionFragment('match', left, self.parse(stream))
        if stream.accept('=>'):
            return ConditionFragment('rewrite', left, self.parse(stream))
        if stream.accept(':'):
            return ConditionFragment('sort', left, self.signature.check_sort(
                _word(stream, 'sort name')))
        return ConditionFragment('eq', left, self.signature.constant('true'))


# Strategies

class StrategyParser:
    '''Parses strategy expressions.

    Precedence, tightest first: postfix `*`, `+` and `!`; `;`; `|`; then the
    conditional `? :` and `or-else`, which cannot be mixed without
    parentheses. The strategy of a matchrew part extends as far as possible.
    '''

    def __init__(self, module, terms):
        self.module = module
        self.terms = terms

    def parse(self, stream):
        first = self._union(stream)
        if stream.accept('?'):
            then = self._union(stream)
            stream.expect(':')
            otherwise = self._union(stream)
            if stream.peek() in ('?', 'or-else'):
                raise stream.error('mixed conditional operators need parentheses')
            return st.Conditional(first, then, otherwise)
        if stream.peek() == 'or-else':
            result = first
            while stream.accept('or-else'):
                result = st.OrElse(result, self._union(stream))
            if stream.peek() == '?':
                raise stream.error('mixed conditional operators need parentheses')
            return result
        return first

    def _union(self, stream):
        items = [self._seq(stream)]
        while stream.accept('|'):
            items.append(self._seq(stream))
        return items[0] if len(items) == 1 else st.Union(tuple(items))

    def _seq(self, stream):
        items = [self._postfix(stream)]
        while stream.accept(';'):
            items.append(self._postfix(stream))
        return items[0] if len(items) == 1 else st.Seq(tuple(items))

    def _postfix(self, stream):
        result = self._atom(stream)
        while True:
            if stream.accept('*'):
                result = st.Star(result)
            elif stream.accept('+'):
                result = st.Plus(result)
            elif stream.accept('!'):
                result = st.Bang(result)
            else:
                return result

    def _atom(self, stream):
        word = stream.peek()
        if stream.accept('('):
            result = self.parse(stream)
            stream.expect(')')
            return result
        if stream.accept('idle'):
            return st.IDLE
        if stream.accept('fail'):
            return st.FAIL
        if word == 'top' and stream.peek(1) == '(':
            stream.next()
            stream.next()
            inner = self._rule_app(stream)
            stream.expect(')')
            if not isinstance(inner, st.RuleApp):
                raise stream.error('top expects a rule application')
            return st.RuleApp(inner.label, inner.subst, inner.cond_strats, True)
        if word in ('try', 'not', 'test') and stream.peek(1) == '(':
            stream.next()
            stream.next()
            inner = self.parse(stream)
            stream.expect(')')
            return {'try': st.Try, 'not': st.Not, 'test': st.Test}[word](inner)
        if word in ('match', 'xmatch', 'amatch'):
            stream.next()
            pattern = self.terms.parse(stream)
            condition = self.terms.parse_condition(stream) if stream.accept('s.t.') else ()
            return st.MatchTest(word, pattern, condition)
        if word in ('matchrew', 'xmatchrew', 'amatchrew'):
            return self._matchrew(stream)
        if word == 'all' or word not in STRATEGY_KEYWORDS and word != END_OF_INPUT:
            if word in PUNCTUATION_TOKENS:
                raise stream.error('expected a strategy')
            if stream.peek(1) == '(' and word != 'all':
                return self._call(stream)
            return self._rule_app(stream)
        raise stream.error('expected a strategy')

    def _call(self, stream):
        token = stream.next()
        stream.expect('(')
        args = [self.terms.parse(stream)]
        while stream.accept(','):
            args.append(self.terms.parse(stream))
        stream.expect(')')
        if len(args) not in self.module.strategy_arities(token.text):
            raise UnknownStrategy('no strategy {}/{} (line {}, column {})'.format(
                token.text, len(args), token.line, token.column))
        return st.Call(token.text, tuple(args))

    def _rule_app(self, stream):
        token = stream.next()
        name = token.text
        bracketed = stream.peek() in ('[', '{')
        if name == 'all':
            label = None
        elif not bracketed and 0 in self.module.strategy_arities(name):
            return st.Call(name, ())
        elif name in self.module.labels:
            label = name
        else:
            raise UnknownRuleLabel('no rule or strategy named {!r} (line {}, column {})'.format(
                name, token.line, token.column))
        subst = []
        if stream.accept('['):
            while True:
                var = _word(stream, 'variable name').split(':', 1)[0]
                stream.expect('<-')
                subst.append((var, self.terms.parse(stream)))
                if not stream.accept(','):
                    break
            stream.expect(']')
        cond_strats = []
        if stream.accept('{'):
            cond_strats.append(self.parse(stream))
            while stream.accept(','):
                cond_strats.append(self.parse(stream))
            stream.expect('}')
        return st.RuleApp(label, tuple(subst), tuple(cond_strats))

    def _matchrew(self, stream):
        mode = stream.next().text.replace('rew', '')
        pattern = self.terms.parse(stream)
        condition = self.terms.parse_condition(stream) if stream.accept('s.t.') else ()
        stream.expect('by')
        parts = []
        names = set()
        while True:
            var = self.terms.parse(stream)
            if not isinstance(var, Variable):
                raise stream.error('matchrew parts must be variables')
            if var in names:
                raise stream.error('variable {} used twice in matchrew'.format(var))
            if var not in variables(pattern):
                raise stream.error('variable {} does not occur in the pattern'.format(var))
            names.add(var)
            stream.expect('using')
            parts.append((var, self.parse(stream)))
            if not stream.accept(','):
                break
        return st.Matchrew(mode, pattern, condition, tuple(parts))


# Formulae

_UNARY = {'~', 'O', '<>', '[]'}


class FormulaParser:
    '''Infix LTL syntax, built into a term of sort Formula.

    Binding strength from loosest: `->` and `<->`, then `U`, `R` and `W`
    (all right associative), `\\/`, `/\\`, and the unary operators.
    Anything else is an ordinary prefix term.
    '''

    def __init__(self, signature, terms):
        self.signature = signature
        self.terms = terms

    def parse(self, stream):
        left = self._until(stream)
        if stream.peek() in ('->', '<->'):
            op = stream.next()
            return self._build(op, (left, self.parse(stream)))
        return left

    def _until(self, stream):
        left = self._or(stream)
        if stream.peek() in ('U', 'R', 'W'):
            op = stream.next()
            return self._build(op, (left, self._until(stream)))
        return left

    def _or(self, stream):
        result = self._and(stream)
        while stream.peek() == '\\/':
            op = stream.next()
            result = self._build(op, (result, self._and(stream)))
        return result

    def _and(self, stream):
        result = self._unary(stream)
        while stream.peek() == '/\\':
            op = stream.next()
            result = self._build(op, (result, self._unary(stream)))
        return result

    def _unary(self, stream):
        if stream.peek() in _UNARY:
            op = stream.next()
            return self._build(op, (self._unary(stream),))
        if stream.accept('('):
            result = self.parse(stream)
            stream.expect(')')
            return result
        return self.terms.parse(stream)

    def _build(self, token, args):
        symbol = self.signature.lookup(token.text, len(args))
        if symbol is None:
            raise UnknownOperator('no formula operator {} (line {}, column {})'.format(
                token.text, token.line, token.column))
        try:
            return make(symbol, args)
        except NoSort:
            raise PropSortMismatch('arguments of {} are not formulae (line {}, column {})'.format(
                token.text, token.line, token.column))


def _parse_whole(text, parse):
    stream = stream_of(text)
    if stream.at_end():
        raise stream.error('empty input')
    result = parse(stream)
    stream.expect_end()
    return result


def term_parser(module):
    return TermParser(module.signature, module.variables)


def parse_term(text, module):
    '''Parse a term written in prefix notation against a flattened module.'''
    return _parse_whole(text, term_parser(module).parse)


def parse_strategy(text, module):
    return _parse_whole(text, StrategyParser(module, term_parser(module)).parse)


def parse_formula_term(text, module):
    '''Parse LTL syntax into an unreduced term of sort Formula.'''
    term = _parse_whole(text, FormulaParser(module.signature, term_parser(module)).parse)
    if not module.signature.leq(term.sort, 'Formula'):
        raise PropSortMismatch('{} has sort {}, not Formula'.format(term, term.sort))
    return term


def parse_formula(text, module):
    '''Parse, reduce and convert an LTL formula to its syntax tree.'''
    term = module.reducer().reduce(parse_formula_term(text, module))
    return formula_from_term(term, module.signature)
