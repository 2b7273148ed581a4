"""
Order-sorted terms kept in canonical form modulo associativity, commutativity
and identity.

Terms are immutable and hash-consed by value: two terms are equal exactly when
they are equal modulo the structural axioms of their operators, because
`make` always produces the flattened, identity-free, sorted representation.
"""

from collections.abc import Mapping

from stratmc.errors import NoSort, UnknownSort, UnsortableResult, SpecSyntaxError

# Pseudo-sort accepted in any argument position (used by polymorphic builtins).
UNIVERSAL = 'Universal'


class Signature:
    '''Sorts, the subsort partial order and the operator symbols of a module.'''

    def __init__(self):
        self.sorts = []
        self._subsorts = set()
        self._leq = None
        self._kinds = None
        self.symbols = {}

    def add_sort(self, name):
        if name not in self.sorts:
            self.sorts.append(name)
            self._leq = None

    def add_subsort(self, sub, sup):
        for name in (sub, sup):
            if name not in self.sorts:
                raise UnknownSort('unknown sort {!r} in subsort declaration'.format(name))
        self._subsorts.add((sub, sup))
        self._leq = None

    def _close(self):
        supers = {s: {s} for s in self.sorts}
        changed = True
        while changed:
            changed = False
            for sub, sup in self._subsorts:
                for s in self.sorts:
                    if sub in supers[s] and not supers[sup] <= supers[s]:
                        supers[s] |= supers[sup]
                        changed = True
        for s in self.sorts:
            for t in supers[s]:
                if t != s and s in supers[t]:
                    raise SpecSyntaxError('cyclic subsort relation between {} and {}'.format(s, t))
        self._leq = supers

        parent = {s: s for s in self.sorts}

        def find(s):
            while parent[s] != s:
                parent[s] = parent[parent[s]]
                s = parent[s]
            return s

        for sub, sup in self._subsorts:
            parent[find(sub)] = find(sup)
        components = {}
        for s in self.sorts:
            components.setdefault(find(s), []).append(s)
        self._kinds = {}
        for members in components.values():
            tops = sorted(s for s in members
                          if not any(t != s for t in supers[s]))
            kind = '[' + ','.join(tops) + ']'
            for s in members:
                self._kinds[s] = kind

    def leq(self, sub, sup):
        '''Whether `sub` is a subsort of (or equal to) `sup`.'''
        if sub == sup or sup == UNIVERSAL:
            return True
        if self._leq is None:
            self._close()
        if sub.startswith('['):
            return False
        if sup.startswith('['):
            return self.kind(sub) == sup
        supers = self._leq.get(sub)
        return supers is not None and sup in supers

    def kind(self, sort):
        if sort.startswith('[') or sort == UNIVERSAL:
            return sort
        if self._kinds is None:
            self._close()
        try:
            return self._kinds[sort]
        except KeyError:
            raise UnknownSort('unknown sort {!r}'.format(sort))

    def same_kind(self, a, b):
        if a == UNIVERSAL or b == UNIVERSAL:
            return True
        return self.kind(a) == self.kind(b)

    def check_sort(self, name):
        if name not in self.sorts and name != UNIVERSAL:
            raise UnknownSort('unknown sort {!r}'.format(name))
        return name

    def declare(self, name, arg_sorts, result, assoc=False, comm=False,
                ctor=False, frozen=False, builtin=False):
        for s in list(arg_sorts) + [result]:
            self.check_sort(s)
        key = (name, len(arg_sorts))
        symbol = self.symbols.get(key)
        if symbol is None:
            symbol = OpSymbol(self, name, len(arg_sorts))
            self.symbols[key] = symbol
        symbol.add_declaration(tuple(arg_sorts), result)
        symbol.assoc = symbol.assoc or assoc
        symbol.comm = symbol.comm or comm
        symbol.ctor = symbol.ctor or ctor
        symbol.frozen = symbol.frozen or frozen
        symbol.builtin = symbol.builtin or builtin
        if symbol.assoc:
            if len(arg_sorts) != 2:
                raise SpecSyntaxError('associative operator {!r} must be binary'.format(name))
            if not (self.same_kind(arg_sorts[0], result) and self.same_kind(arg_sorts[1], result)):
                raise SpecSyntaxError(
                    'associative operator {!r} mixes sort components'.format(name))
        return symbol

    def lookup(self, name, arity):
        '''Find the symbol for `name` applied to `arity` arguments.

        Associative symbols also accept any number of arguments above two.
        '''
        symbol = self.symbols.get((name, arity))
        if symbol is None and arity > 2:
            symbol = self.symbols.get((name, 2))
            if symbol is not None and not symbol.assoc:
                symbol = None
        return symbol

    def constant(self, name):
        return make(self.symbols[(name, 0)], ())

    def literal_sort(self, value):
        if isinstance(value, str):
            return 'Qid'
        if value > 0:
            return 'NzNat'
        return 'Nat' if value == 0 else 'Int'


class OpSymbol:
    '''An operator name and arity with its (possibly overloaded) declarations.'''

    __slots__ = ('signature', 'name', 'arity', 'decls', 'assoc', 'comm', 'identity',
                 'ctor', 'frozen', 'builtin', 'key', '_sort_cache')

    def __init__(self, signature, name, arity):
        self.signature = signature
        self.name = name
        self.arity = arity
        self.decls = []
        self.assoc = False
        self.comm = False
        self.identity = None
        self.ctor = False
        self.frozen = False
        self.builtin = False
        self.key = (name, arity)
        self._sort_cache = {}

    def add_declaration(self, arg_sorts, result):
        if (arg_sorts, result) not in self.decls:
            self.decls.append((arg_sorts, result))
            self._sort_cache.clear()

    def _result(self, arg_sorts):
        cached = self._sort_cache.get(arg_sorts)
        if cached is not None:
            return cached
        sig = self.signature
        candidates = [res for (decl, res) in self.decls
                      if all(sig.leq(a, d) for a, d in zip(arg_sorts, decl))]
        if candidates:
            best = candidates[0]
            for c in candidates[1:]:
                if sig.leq(c, best):
                    best = c
        elif any(all(sig.same_kind(a, d) for a, d in zip(arg_sorts, decl))
                 for (decl, _) in self.decls):
            best = sig.kind(self.decls[0][1])
        else:
            raise NoSort('no declaration of {} applies to argument sorts ({})'.format(
                self.name, ', '.join(arg_sorts)))
        self._sort_cache[arg_sorts] = best
        return best

    def sort_of(self, args):
        if self.assoc and len(args) > 2:
            sort = args[-1].sort
            for a in reversed(args[:-1]):
                sort = self._result((a.sort, sort))
            return sort
        return self._result(tuple(a.sort for a in args))

    def __repr__(self):
        return '{}/{}'.format(self.name, self.arity)


class Term:
    __slots__ = ('sort', '_hash', '_key', '_ground')

    def __ne__(self, other):
        return not self == other

    def __lt__(self, other):
        return order_key(self) < order_key(other)

    def __repr__(self):
        return 'Term({})'.format(self)


class Variable(Term):
    __slots__ = ('name',)

    def __init__(self, name, sort):
        self.name = name
        self.sort = sort
        self._hash = hash(('var', name, sort))
        self._key = (0, name, sort)
        self._ground = False

    def __eq__(self, other):
        return self is other or (isinstance(other, Variable)
                                 and self.name == other.name and self.sort == other.sort)

    def __hash__(self):
        return self._hash

    def __str__(self):
        return '{}:{}'.format(self.name, self.sort)


class Literal(Term):
    '''Builtin constant: an integer or a quoted identifier.'''

    __slots__ = ('value',)

    def __init__(self, value, sort):
        self.value = value
        self.sort = sort
        self._hash = hash(('lit', value))
        self._key = (1, 1 if isinstance(value, str) else 0, value)
        self._ground = True

    def __eq__(self, other):
        return self is other or (isinstance(other, Literal) and self._key == other._key)

    def __hash__(self):
        return self._hash

    def __str__(self):
        return str(self.value)


class Application(Term):
    __slots__ = ('symbol', 'args')

    def __init__(self, symbol, args, sort):
        self.symbol = symbol
        self.args = args
        self.sort = sort
        self._hash = hash((symbol.key, args))
        self._key = None
        self._ground = all(a._ground for a in args)

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Application) and self._hash == other._hash
                and self.symbol.key == other.symbol.key and self.args == other.args)

    def __hash__(self):
        return self._hash

    def __str__(self):
        if not self.args:
            return self.symbol.name
        return '{}({})'.format(self.symbol.name, ', '.join(str(a) for a in self.args))


def order_key(term):
    '''Fixed total order on terms: variables, literals, then applications by name.'''
    key = term._key
    if key is None:
        key = (2, term.symbol.name, term.symbol.arity, tuple(order_key(a) for a in term.args))
        term._key = key
    return key


def is_ground(term):
    return term._ground


def literal(signature, value):
    return Literal(value, signature.literal_sort(value))


def make(symbol, args):
    '''Build `symbol(args)` in canonical form.

    Arguments headed by the same associative symbol are spliced, identity
    elements are dropped, and the arguments of commutative symbols sorted.
    '''
    args = tuple(args)
    if symbol.assoc:
        flat = []
        identity = symbol.identity
        for a in args:
            if isinstance(a, Application) and a.symbol.key == symbol.key:
                flat.extend(a.args)
            elif identity is not None and a == identity:
                continue
            else:
                flat.append(a)
        if len(flat) < 2:
            if flat:
                return flat[0]
            if identity is None:
                raise UnsortableResult('empty argument list for {}'.format(symbol.name))
            return identity
        if symbol.comm:
            flat.sort(key=order_key)
        args = tuple(flat)
    elif symbol.comm and len(args) == 2 and order_key(args[1]) < order_key(args[0]):
        args = (args[1], args[0])
    return Application(symbol, args, symbol.sort_of(args))


def variables(term):
    '''Set of variables occurring in a term.'''
    if isinstance(term, Variable):
        return {term}
    if term._ground:
        return set()
    result = set()
    for a in term.args:
        result |= variables(a)
    return result


def subterms(term):
    '''Yield every subterm (including the term itself) in preorder.'''
    yield term
    if isinstance(term, Application):
        for a in term.args:
            yield from subterms(a)


def instantiate(term, mapping):
    '''Replace variables by their bindings and renormalize.'''
    if term._ground:
        return term
    if isinstance(term, Variable):
        return mapping.get(term, term)
    args = tuple(instantiate(a, mapping) for a in term.args)
    if args == term.args:
        return term
    try:
        return make(term.symbol, args)
    except NoSort as e:
        raise UnsortableResult(str(e))


class Substitution(Mapping):
    '''Immutable, hashable mapping from variables to terms.'''

    __slots__ = ('_map', '_hash')

    def __init__(self, mapping=None):
        self._map = dict(mapping) if mapping else {}
        self._hash = None

    def __getitem__(self, var):
        return self._map[var]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if isinstance(other, Substitution):
            return self._map == other._map
        return NotImplemented

    def get(self, var, default=None):
        return self._map.get(var, default)

    def by_name(self, name):
        for var in self._map:
            if var.name == name:
                return var
        return None

    def extend(self, var, term):
        mapping = dict(self._map)
        mapping[var] = term
        return Substitution(mapping)

    def update(self, other):
        '''Bindings of `self` overridden by those of `other`.'''
        if not other:
            return self
        if not self._map:
            return other if isinstance(other, Substitution) else Substitution(other)
        mapping = dict(self._map)
        mapping.update(other)
        return Substitution(mapping)

    def restrict(self, variables):
        return Substitution({v: t for v, t in self._map.items() if v in variables})

    def without(self, variables):
        return Substitution({v: t for v, t in self._map.items() if v not in variables})

    def apply(self, term):
        return instantiate(term, self._map)

    def compose(self, other):
        '''Substitution equivalent to applying `self` and then `other`.'''
        mapping = {v: instantiate(t, other._map) for v, t in self._map.items()}
        for v, t in other._map.items():
            mapping.setdefault(v, t)
        return Substitution(mapping)

    def __str__(self):
        items = sorted(self._map.items(), key=lambda kv: order_key(kv[0]))
        return '{' + ', '.join('{} <- {}'.format(v.name, t) for v, t in items) + '}'

    def __repr__(self):
        return 'Substitution({})'.format(self)


EMPTY_SUBSTITUTION = Substitution()
