"""
Miscellaneous utility functions.
"""

import random
import time
from contextlib import contextmanager

import numpy as np
import progressbar


@contextmanager
def timer(meter):
    start_time = time.perf_counter()
    yield
    time_elapsed = time.perf_counter() - start_time
    meter.add(time_elapsed)


def seed_random_number_generators(seed):
    """Seed all random number generators."""

    random.seed(seed)
    np.random.seed(seed)


class ExplorationProgress:
    '''Reports the number of discovered states while a graph is explored.

    Does nothing unless enabled.
    '''

    def __init__(self, enabled=False, every=100):
        self.every = every
        self.bar = None
        if enabled:
            self.bar = progressbar.ProgressBar(max_value=progressbar.UnknownLength,
                                               prefix='states ')

    def update(self, count):
        if self.bar is not None and count % self.every == 0:
            self.bar.update(count)

    def finish(self):
        if self.bar is not None:
            self.bar.finish()
