'''Strategy-aware rewriting and LTL model checking.'''

__version__ = '0.1.0a'
