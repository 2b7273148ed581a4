"""
Exceptions raised by the rewriting engine, the specification frontend and
the model checker.
"""


class StratMCError(Exception):
    '''Base class of every error reported by stratmc.'''


class SpecSyntaxError(StratMCError):
    '''Malformed specification, term, strategy or formula text.'''

    def __init__(self, message, line=None, column=None, token=None):
        self.line = line
        self.column = column
        self.token = token
        if line is not None:
            message = '{} (line {}, column {}, near {!r})'.format(message, line, column, token)
        super().__init__(message)


class DuplicateDeclaration(StratMCError):
    pass


class UnknownIdentifier(StratMCError):
    pass


class UnknownSort(UnknownIdentifier):
    pass


class UnknownOperator(UnknownIdentifier):
    pass


class UnknownStrategy(UnknownIdentifier):
    pass


class UnknownRuleLabel(UnknownIdentifier):
    pass


class AmbiguousOverload(StratMCError):
    def __init__(self, name, candidates):
        self.candidates = list(candidates)
        super().__init__('ambiguous identifier {!r}, candidates: {}'.format(
            name, ', '.join(str(c) for c in self.candidates)))


class NoSort(StratMCError):
    pass


class UnsortableResult(StratMCError):
    pass


class UnboundVariable(StratMCError):
    pass


class ArityMismatch(StratMCError):
    pass


class NonTermination(StratMCError):
    def __init__(self, limit):
        self.limit = limit
        super().__init__('equational reduction exceeded the ceiling of {} rewrites'.format(limit))


class StateSpaceCeiling(StratMCError):
    def __init__(self, limit, what='states'):
        self.limit = limit
        super().__init__('exploration exceeded the ceiling of {} {}'.format(limit, what))


class CyclicImport(StratMCError):
    pass


class MissingModule(StratMCError):
    pass


class PropSortMismatch(StratMCError):
    pass


class UndefinedProposition(StratMCError):
    def __init__(self, prop, state_term, result):
        self.prop = prop
        self.state_term = state_term
        super().__init__('proposition {} does not reduce to a boolean in state {} (got {})'.format(
            prop, state_term, result))


class InvalidCounterexample(StratMCError):
    '''A counterexample found by the search that does not replay on the model.'''

    def __init__(self, step, check, detail=''):
        self.step = step
        self.check = check
        super().__init__('invalid counterexample at step {} ({}): {}'.format(step, check, detail))
