import unittest
from functools import lru_cache

from stratmc.module import load_module, parse_file, select_module
from stratmc.parser import parse_formula, parse_strategy, parse_term
from stratmc.util import seed_random_number_generators

SEED = 0


@lru_cache(maxsize=None)
def corpus_module(name, module=None):
    '''Flattened module of a bundled example, shared between tests.'''
    return load_module(name, module)


def module_from_text(text, name=None):
    return select_module(parse_file(text), name)


class TestCase(unittest.TestCase):
    def setUp(self):
        seed_random_number_generators(SEED)

    def term(self, module, text):
        '''Parse and reduce a term.'''
        return module.reducer().reduce(parse_term(text, module))

    def terms(self, module, *texts):
        return [self.term(module, text) for text in texts]

    def strategy(self, module, text):
        return parse_strategy(text, module)

    def formula(self, module, text):
        return parse_formula(text, module)
