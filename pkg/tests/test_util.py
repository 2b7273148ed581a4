import random

import numpy as np
from tele.meter import SumMeter

from tests.common import TestCase

from stratmc.util import ExplorationProgress, seed_random_number_generators, timer


class TestUtil(TestCase):
    def test_timer(self):
        meter = SumMeter()

        with timer(meter):
            sum(range(1000))
        with timer(meter):
            pass

        self.assertGreaterEqual(meter.value(), 0)

    def test_seed(self):
        seed_random_number_generators(7)
        expected = (random.random(), np.random.rand())

        seed_random_number_generators(7)
        actual = (random.random(), np.random.rand())

        self.assertEqual(actual, expected)

    def test_disabled_progress(self):
        progress = ExplorationProgress()

        for count in range(1, 250):
            progress.update(count)
        progress.finish()

        self.assertIsNone(progress.bar)

    def test_enabled_progress(self):
        progress = ExplorationProgress(enabled=True, every=10)

        for count in range(1, 50):
            progress.update(count)
        progress.finish()

        self.assertIsNotNone(progress.bar)
