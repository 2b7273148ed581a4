"""
Pattern matching modulo associativity, commutativity and identity.

Matching works on canonical terms (see `stratmc.term.make`): the arguments of
an associative operator form a flat list, matched by contiguous splits, and
those of an associative-commutative operator a sorted multiset, matched by
distributing its elements among the pattern arguments.
"""

from itertools import combinations

from stratmc.term import Application, Literal, Variable, Substitution, literal, make

INFINITY = float('inf')


class Context:
    '''A term with a hole, stored as the path of enclosing argument lists.

    Each step is `(symbol, before, after)`: the hole sits between the `before`
    and `after` arguments of `symbol`. For associative symbols the hole may
    stand for a whole segment, which `plug` splices back by renormalizing.
    '''

    __slots__ = ('steps', '_hash')

    def __init__(self, steps=()):
        self.steps = steps
        self._hash = hash(tuple((sym.key, before, after) for sym, before, after in steps))

    def plug(self, term):
        for symbol, before, after in reversed(self.steps):
            term = make(symbol, before + (term,) + after)
        return term

    def is_empty(self):
        return not self.steps

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Context) or self._hash != other._hash:
            return False
        return len(self.steps) == len(other.steps) and all(
            a[0].key == b[0].key and a[1] == b[1] and a[2] == b[2]
            for a, b in zip(self.steps, other.steps))

    def __hash__(self):
        return self._hash

    def __str__(self):
        text = '[]'
        for symbol, before, after in reversed(self.steps):
            text = '{}({})'.format(symbol.name, ', '.join(
                [str(a) for a in before] + [text] + [str(a) for a in after]))
        return text


EMPTY_CONTEXT = Context()


def substitution_key(mapping):
    return frozenset(mapping.items())


class Matcher:
    '''Enumerates matches of patterns against canonical subject terms.'''

    def __init__(self, signature):
        self.signature = signature

    def match(self, pattern, subject, subst=None):
        '''Yield every extension of `subst` (a dict) matching `pattern` to `subject`.

        Results are deduplicated.
        '''
        seen = set()
        for s in self._match(pattern, subject, dict(subst) if subst else {}):
            key = substitution_key(s)
            if key not in seen:
                seen.add(key)
                yield s

    def matches(self, pattern, subject, subst=None):
        return [Substitution(s) for s in self.match(pattern, subject, subst)]

    def _bind(self, s, var, term):
        s2 = dict(s)
        s2[var] = term
        return s2

    def _match(self, p, t, s):
        if isinstance(p, Variable):
            bound = s.get(p)
            if bound is not None:
                if bound == t:
                    yield s
            elif self.signature.leq(t.sort, p.sort):
                yield self._bind(s, p, t)
            return
        if p._ground:
            if p == t:
                yield s
            return
        sym = p.symbol
        same = isinstance(t, Application) and t.symbol.key == sym.key
        if (sym.builtin and sym.name == 's' and isinstance(t, Literal)
                and isinstance(t.value, int) and t.value > 0):
            yield from self._match(p.args[0], literal(self.signature, t.value - 1), s)
            return
        if sym.assoc:
            if same:
                elements = t.args
            elif sym.identity is not None:
                elements = (t,)
            else:
                return
            if sym.comm:
                yield from self._match_ac(sym, p.args, elements, s)
            else:
                yield from self._match_assoc(sym, p.args, elements, s)
            return
        if not same:
            return
        if sym.comm:
            yield from self._match_args(p.args, t.args, s)
            if t.args[0] != t.args[1]:
                yield from self._match_args(p.args, (t.args[1], t.args[0]), s)
            return
        yield from self._match_args(p.args, t.args, s)

    def _match_args(self, ps, ts, s):
        if not ps:
            yield s
            return
        for s1 in self._match(ps[0], ts[0], s):
            yield from self._match_args(ps[1:], ts[1:], s1)

    @staticmethod
    def _as_segment(sym, term):
        if isinstance(term, Application) and term.symbol.key == sym.key:
            return term.args
        if sym.identity is not None and term == sym.identity:
            return ()
        return (term,)

    @staticmethod
    def _segment_term(sym, segment):
        if not segment:
            return sym.identity
        if len(segment) == 1:
            return segment[0]
        return make(sym, segment)

    def _min_length(self, sym, ps):
        if sym.identity is not None:
            return sum(1 for p in ps if not isinstance(p, Variable))
        return len(ps)

    def _match_assoc(self, sym, ps, ts, s):
        if not ps:
            if not ts:
                yield s
            return
        p, rest = ps[0], ps[1:]
        n = len(ts)
        if not isinstance(p, Variable):
            if n:
                for s1 in self._match(p, ts[0], s):
                    yield from self._match_assoc(sym, rest, ts[1:], s1)
            return
        bound = s.get(p)
        if bound is not None:
            segment = self._as_segment(sym, bound)
            k = len(segment)
            if ts[:k] == segment:
                yield from self._match_assoc(sym, rest, ts[k:], s)
            return
        lowest = 0 if sym.identity is not None else 1
        if rest:
            lengths = range(lowest, n - self._min_length(sym, rest) + 1)
        else:
            lengths = [n] if n >= lowest else []
        for k in lengths:
            value = self._segment_term(sym, ts[:k])
            if self.signature.leq(value.sort, p.sort):
                yield from self._match_assoc(sym, rest, ts[k:], self._bind(s, p, value))

    def _match_ac(self, sym, ps, ts, s):
        nonvars = [p for p in ps if not isinstance(p, Variable)]
        pvars = [p for p in ps if isinstance(p, Variable)]
        yield from self._ac_nonvars(sym, nonvars, pvars, list(ts), s)

    def _ac_nonvars(self, sym, nonvars, pvars, remaining, s):
        if not nonvars:
            yield from self._ac_distribute(sym, pvars, remaining, s)
            return
        p = nonvars[0]
        tried = set()
        for i, t in enumerate(remaining):
            if t in tried:
                continue
            tried.add(t)
            rest = remaining[:i] + remaining[i + 1:]
            for s1 in self._match(p, t, s):
                yield from self._ac_nonvars(sym, nonvars[1:], pvars, rest, s1)

    def _ac_distribute(self, sym, pvars, remaining, s):
        if not pvars:
            if not remaining:
                yield s
            return
        v, others = pvars[0], pvars[1:]
        bound = s.get(v)
        if bound is not None:
            rest = list(remaining)
            for element in self._as_segment(sym, bound):
                if element not in rest:
                    return
                rest.remove(element)
            yield from self._ac_distribute(sym, others, rest, s)
            return
        n = len(remaining)
        if not others:
            value = self._segment_term(sym, tuple(remaining))
            if value is not None and self.signature.leq(value.sort, v.sort):
                yield self._bind(s, v, value)
            return
        lowest = 0 if sym.identity is not None else 1
        reserve = 0 if sym.identity is not None else len(others)
        seen = set()
        for k in range(lowest, n - reserve + 1):
            for chosen_idx in combinations(range(n), k):
                chosen = tuple(remaining[i] for i in chosen_idx)
                if chosen in seen:
                    continue
                seen.add(chosen)
                value = self._segment_term(sym, chosen)
                if value is None or not self.signature.leq(value.sort, v.sort):
                    continue
                picked = set(chosen_idx)
                rest = [remaining[i] for i in range(n) if i not in picked]
                yield from self._ac_distribute(sym, others, rest, self._bind(s, v, value))

    # Positions

    def head_compatible(self, pattern, term):
        '''Cheap necessary condition for `pattern` to match `term`.'''
        if isinstance(pattern, Variable):
            return self.signature.same_kind(pattern.sort, term.sort)
        if isinstance(pattern, Literal):
            return pattern == term
        sym = pattern.symbol
        if isinstance(term, Application) and term.symbol.key == sym.key:
            return True
        if sym.assoc and sym.identity is not None:
            return True
        return sym.builtin and sym.name == 's' and isinstance(term, Literal)

    def _segment_bounds(self, pattern, sym):
        if isinstance(pattern, Variable):
            return 2, INFINITY
        if isinstance(pattern, Application) and pattern.symbol.key == sym.key:
            pvars = sum(1 for a in pattern.args if isinstance(a, Variable))
            fixed = len(pattern.args) - pvars
            lowest = fixed if sym.identity is not None else len(pattern.args)
            return max(2, lowest), (INFINITY if pvars else len(pattern.args))
        return None

    def _segments(self, t, pattern):
        sym = t.symbol
        n = len(t.args)
        bounds = self._segment_bounds(pattern, sym)
        if bounds is None or n < 3:
            return
        lowest, highest = bounds
        if sym.comm:
            for k in range(lowest, min(highest, n - 1) + 1):
                seen = set()
                for idx in combinations(range(n), k):
                    chosen = tuple(t.args[i] for i in idx)
                    if chosen in seen:
                        continue
                    seen.add(chosen)
                    picked = set(idx)
                    rest = tuple(t.args[i] for i in range(n) if i not in picked)
                    yield make(sym, chosen), (sym, rest, ())
        else:
            for i in range(n):
                for j in range(i + lowest, n + 1):
                    if j - i > highest or j - i >= n:
                        break
                    yield make(sym, t.args[i:j]), (sym, t.args[:i], t.args[j:])

    def positions(self, subject, pattern, anywhere=False, ext=False):
        '''Yield `(subterm, Context)` pairs where `pattern` is worth trying.

        With `ext` (or `anywhere`) the proper segments of associative argument
        lists are offered as subterms too.
        '''
        for term, steps in self._positions(subject, (), pattern, anywhere, ext):
            yield term, Context(steps)

    def _positions(self, t, path, pattern, anywhere, ext):
        if self.head_compatible(pattern, t):
            yield t, path
        if not isinstance(t, Application):
            return
        if t.symbol.assoc and (ext or anywhere):
            for segment, step in self._segments(t, pattern):
                if self.head_compatible(pattern, segment):
                    yield segment, path + (step,)
        if anywhere:
            args = t.args
            for i, a in enumerate(args):
                step = (t.symbol, args[:i], args[i + 1:])
                yield from self._positions(a, path + (step,), pattern, anywhere, False)
