"""
Specification modules: import resolution, flattening and declaration
checking.

A file is first cut into `ModuleSyntax` records. Each module is then built
flat: the prelude, every transitively imported module (once each, in
dependency order) and the module itself are declared against one shared
signature, and only then are equations, rules and strategy definitions
parsed, each with the variables of the module that wrote it.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from stratmc import strategy as st
from stratmc.equations import Equation, Reducer, format_condition, make_rule, condition_variables
from stratmc.errors import (CyclicImport, MissingModule, DuplicateDeclaration, SpecSyntaxError,
                            UnboundVariable)
from stratmc.parser import (split_modules, sort_names, subsort_chain, op_declaration,
                            var_declaration, strat_declaration, statement_attributes,
                            TermParser, StrategyParser, TokenStream, ModuleSyntax)
from stratmc.term import Signature, Variable, Application, variables

logger = logging.getLogger(__name__)

PACKAGE_DIR = Path(__file__).parent
PRELUDE_PATH = PACKAGE_DIR / 'prelude.rwspec'
CORPUS_DIR = PACKAGE_DIR / 'corpus'
PRELUDE = 'PRELUDE'


@dataclass(frozen=True)
class StratDecl:
    name: str
    arg_sorts: tuple
    subject: str

    def __str__(self):
        args = ' '.join(self.arg_sorts)
        return 'strat {} : {}@ {}'.format(self.name, args + ' ' if args else '', self.subject)


@dataclass(frozen=True)
class StrategyDefinition:
    name: str
    params: tuple
    body: object
    condition: tuple = ()

    def __str__(self):
        lhs = self.name
        if self.params:
            lhs += '(' + ', '.join(str(p) for p in self.params) + ')'
        text = 'sd {} := {}'.format(lhs, self.body)
        if self.condition:
            text = 'c' + text + ' if ' + format_condition(self.condition)
        return text


class SpecModule:
    '''A flattened module: every declaration it can see, ready for use.'''

    def __init__(self, name, kind, imports, library):
        self.name = name
        self.kind = kind
        self.imports = list(imports)
        self.library = library
        self.included = []
        self.signature = Signature()
        self.variables = {}
        self.equations = []
        self.rules = []
        self.strat_decls = {}
        self.strat_defs = {}
        self._reducer = None

    @property
    def labels(self):
        return list(dict.fromkeys(r.label for r in self.rules if r.label is not None))

    def rules_labeled(self, label):
        return [r for r in self.rules if r.label == label]

    def strategy_arities(self, name):
        return {arity for (n, arity) in self.strat_decls if n == name}

    def definitions(self, name, arity):
        return self.strat_defs.get((name, arity), [])

    @property
    def prop_symbols(self):
        sig = self.signature
        return [sym for sym in sig.symbols.values()
                if any(sig.leq(res, 'Prop') for _, res in sym.decls)]

    @property
    def state_sorts(self):
        return [s for s in self.signature.sorts if s != 'State' and self.signature.leq(s, 'State')]

    def reducer(self, rewrite_limit=None):
        if self._reducer is None:
            self._reducer = Reducer(self)
        if rewrite_limit is not None:
            self._reducer.rewrite_limit = rewrite_limit
        return self._reducer

    def declarations(self):
        '''Comparable summary of everything the module declares.'''
        sig = self.signature
        return (
            tuple(sorted(sig.sorts)),
            tuple(sorted((k, tuple(sym.decls)) for k, sym in sig.symbols.items())),
            tuple(self.equations),
            tuple(self.rules),
            tuple(sorted(self.strat_decls.items())),
            tuple(sorted((k, tuple(v)) for k, v in self.strat_defs.items())),
        )

    def __repr__(self):
        return 'SpecModule({}, {} rules, {} equations)'.format(
            self.name, len(self.rules), len(self.equations))


@lru_cache(maxsize=None)
def prelude_syntax():
    (syntax,) = split_modules(PRELUDE_PATH.read_text(encoding='utf-8'))
    return syntax


def import_order(name, library):
    '''Modules whose declarations `name` sees, dependencies first.'''
    order = []
    done = set()

    def visit(current, path):
        if current in path:
            raise CyclicImport('cyclic import: ' + ' -> '.join(path + (current,)))
        if current in done:
            return
        syntax = library.get(current)
        if syntax is None:
            raise MissingModule('module {} is not defined'.format(current))
        for imported in syntax.imports:
            if imported != PRELUDE:
                visit(imported, path + (current,))
        done.add(current)
        order.append(syntax)

    visit(name, ())
    if name != PRELUDE:
        order.insert(0, prelude_syntax())
    return order


def _located(error, statement):
    if isinstance(error, SpecSyntaxError) and error.line is None:
        return SpecSyntaxError(str(error), statement.start.line, statement.start.column,
                               statement.keyword)
    return error


class _Builder:
    def __init__(self, module, order):
        self.module = module
        self.order = order
        self.local_variables = {}
        self.pending_identities = []

    def run(self):
        sig = self.module.signature
        for phase in (self._sorts, self._subsorts, self._ops, self._identities,
                      self._variables, self._strategies, self._statements,
                      self._definitions):
            for syntax in self.order:
                phase(syntax, sig)
        self._check_definitions()
        return self.module

    def _each(self, syntax, *keywords):
        for statement in syntax.of_kind(*keywords):
            yield statement

    def _sorts(self, syntax, sig):
        for statement in self._each(syntax, 'sort', 'sorts'):
            for name in sort_names(statement):
                sig.add_sort(name)

    def _subsorts(self, syntax, sig):
        for statement in self._each(syntax, 'subsort', 'subsorts'):
            groups = subsort_chain(statement)
            for lower, upper in zip(groups, groups[1:]):
                for sub in lower:
                    for sup in upper:
                        sig.add_subsort(sub, sup)

    def _ops(self, syntax, sig):
        for statement in self._each(syntax, 'op', 'ops'):
            decl = op_declaration(statement)
            attrs = decl.attributes
            for name in decl.names:
                existing = sig.symbols.get((name, len(decl.arg_sorts)))
                if existing is not None and (tuple(decl.arg_sorts), decl.result) in existing.decls:
                    raise DuplicateDeclaration('operator {} : {} -> {} declared twice (line {})'.format(
                        name, ' '.join(decl.arg_sorts), decl.result, statement.start.line))
                try:
                    symbol = sig.declare(name, decl.arg_sorts, decl.result,
                                         assoc=attrs.get('assoc', False),
                                         comm=attrs.get('comm', False),
                                         ctor=attrs.get('ctor', False),
                                         frozen=attrs.get('frozen', False),
                                         builtin=attrs.get('builtin', False))
                except SpecSyntaxError as e:
                    raise _located(e, statement)
                if 'id' in attrs:
                    self.pending_identities.append((syntax.name, symbol, attrs['id'], statement))

    def _identities(self, syntax, sig):
        for owner, symbol, tokens, statement in self.pending_identities:
            if owner != syntax.name:
                continue
            identity = TermParser(sig).parse(TokenStream(tokens))
            if not identity._ground:
                raise _located(SpecSyntaxError('identity element must be ground'), statement)
            symbol.identity = identity

    def _variables(self, syntax, sig):
        table = {}
        for statement in self._each(syntax, 'var', 'vars'):
            names, sort = var_declaration(statement)
            sig.check_sort(sort)
            for name in names:
                previous = table.get(name)
                if previous is not None and previous.sort != sort:
                    raise DuplicateDeclaration('variable {} declared with sorts {} and {}'.format(
                        name, previous.sort, sort))
                table[name] = Variable(name, sort)
        self.local_variables[syntax.name] = table
        self.module.variables.update(table)

    def _strategies(self, syntax, sig):
        for statement in self._each(syntax, 'strat', 'strats'):
            names, arg_sorts, subject = strat_declaration(statement)
            for sort in list(arg_sorts) + [subject]:
                sig.check_sort(sort)
            for name in names:
                key = (name, len(arg_sorts))
                if key in self.module.strat_decls:
                    raise DuplicateDeclaration('strategy {}/{} declared twice'.format(*key))
                self.module.strat_decls[key] = StratDecl(name, tuple(arg_sorts), subject)

    def _terms(self, syntax, sig):
        return TermParser(sig, self.local_variables[syntax.name])

    def _statements(self, syntax, sig):
        terms = self._terms(syntax, sig)
        for statement in syntax.statements:
            if statement.keyword in ('eq', 'ceq'):
                self.module.equations.append(self._equation(statement, terms))
            elif statement.keyword in ('rl', 'crl'):
                self.module.rules.append(self._rule(statement, terms))

    def _equation(self, statement, terms):
        stream = statement.stream()
        lhs = terms.parse(stream)
        stream.expect('=')
        rhs = terms.parse(stream)
        condition = self._condition(statement, stream, terms)
        flags = statement_attributes(stream)
        stream.expect_end()
        if not isinstance(lhs, Application):
            raise _located(SpecSyntaxError('equation lefthand side must be an operator application'),
                           statement)
        if any(f.kind == 'rewrite' for f in condition):
            raise _located(SpecSyntaxError('rewriting condition in an equation'), statement)
        self._check_bound(rhs, variables(lhs) | condition_variables(condition), statement)
        return Equation(lhs, rhs, condition, 'owise' in flags)

    def _rule(self, statement, terms):
        stream = statement.stream()
        label = None
        if stream.accept('['):
            label = stream.next().text
            stream.expect(']')
            stream.expect(':')
        lhs = terms.parse(stream)
        stream.expect('=>')
        rhs = terms.parse(stream)
        condition = self._condition(statement, stream, terms)
        statement_attributes(stream)
        stream.expect_end()
        self._check_bound(rhs, variables(lhs) | condition_variables(condition), statement)
        return make_rule(label, lhs, rhs, condition)

    def _condition(self, statement, stream, terms):
        conditional = statement.keyword in ('ceq', 'crl', 'csd')
        if stream.accept('if'):
            if not conditional:
                raise stream.error('condition in an unconditional statement')
            return terms.parse_condition(stream)
        if conditional:
            raise stream.error('expected a condition')
        return ()

    def _check_bound(self, term, bound, statement):
        missing = variables(term) - bound
        if missing:
            raise UnboundVariable('unbound variables {} (line {})'.format(
                ', '.join(sorted(str(v) for v in missing)), statement.start.line))

    def _definitions(self, syntax, sig):
        terms = self._terms(syntax, sig)
        strategies = StrategyParser(self.module, terms)
        for statement in self._each(syntax, 'sd', 'csd'):
            stream = statement.stream()
            name = stream.next().text
            params = []
            if stream.accept('('):
                params.append(terms.parse(stream))
                while stream.accept(','):
                    params.append(terms.parse(stream))
                stream.expect(')')
            stream.expect(':=')
            body = strategies.parse(stream)
            condition = self._condition(statement, stream, terms)
            stream.expect_end()
            key = (name, len(params))
            if key not in self.module.strat_decls:
                raise _located(SpecSyntaxError(
                    'definition of undeclared strategy {}/{}'.format(*key)), statement)
            definition = StrategyDefinition(name, tuple(params), body, condition)
            definitions = self.module.strat_defs.setdefault(key, [])
            if definition in definitions:
                raise DuplicateDeclaration('duplicate definition {}'.format(definition))
            definitions.append(definition)

    def _check_definitions(self):
        for definitions in self.module.strat_defs.values():
            for d in definitions:
                bound = condition_variables(d.condition)
                for p in d.params:
                    bound |= variables(p)
                missing = st.unbound_variables(d.body, bound)
                if missing:
                    raise UnboundVariable('unbound variables {} in {}'.format(
                        ', '.join(sorted(str(v) for v in missing)), d))


def build_module(name, library):
    order = import_order(name, library)
    syntax = library.get(name) if name != PRELUDE else prelude_syntax()
    module = SpecModule(name, syntax.kind, syntax.imports, library)
    module.included = [s.name for s in order]
    logger.debug('flattening %s from %s', name, ', '.join(module.included))
    return _Builder(module, order).run()


def parse_file(text):
    '''Parse every module of a specification file, each one flattened.'''
    syntaxes = split_modules(text)
    library = {}
    for syntax in syntaxes:
        if syntax.name in library or syntax.name == PRELUDE:
            raise DuplicateDeclaration('module {} declared twice'.format(syntax.name))
        library[syntax.name] = syntax
    modules = [build_module(syntax.name, library) for syntax in syntaxes]
    logger.info('parsed %d modules', len(modules))
    return modules


def flatten(name, modules):
    '''The module `name` with all transitively imported declarations.'''
    library = {}
    for m in modules:
        library.update(m.library)
    if name not in library:
        raise MissingModule('module {} is not defined'.format(name))
    return build_module(name, library)


def select_module(modules, name=None):
    if not modules:
        raise MissingModule('the file declares no module')
    if name is None:
        return modules[-1]
    for m in modules:
        if m.name == name:
            return m
    raise MissingModule('module {} is not defined'.format(name))


def resolve_spec_path(path):
    '''An existing path, or the name of a bundled corpus file.'''
    candidate = Path(path)
    if candidate.exists():
        return candidate
    for bundled in (CORPUS_DIR / path, CORPUS_DIR / (str(path) + '.rwspec')):
        if bundled.exists():
            return bundled
    raise FileNotFoundError('no such specification file: {}'.format(path))


def load_file(path):
    return parse_file(resolve_spec_path(path).read_text(encoding='utf-8'))


def load_module(path, name=None):
    return select_module(load_file(path), name)


__all__ = ['SpecModule', 'StratDecl', 'StrategyDefinition', 'ModuleSyntax', 'parse_file',
           'flatten', 'select_module', 'load_file', 'load_module', 'resolve_spec_path']
