import logging
logger = logging.getLogger(__name__)

import math

from django.test import SimpleTestCase

from chains.domain import ModelSpec
from chains.exceptions import InvalidInput, RequiresInterspecific, RequiresNoIntra
from chains.services.birthdeath import (
    dominating_chain, nice_chain_statistics, run_nice_chain, tabulated_chain,
)
from chains.utils import trial_rng

SPEC = ModelSpec(alpha0=0.5, alpha1=0.5, beta=1, delta=1)
# death probability dominates from state 1 upward, so runs are short
FAST = ModelSpec(alpha0=1, alpha1=1, beta=0.25, delta=0.25)


class DominatingChainTestCase(SimpleTestCase):
    def test_canonical_values(self):
        logger.info('Testing the canonical dominating chain...')
        chain = dominating_chain(SPEC)
        self.assertAlmostEqual(chain.p(1), 2 / 3)
        self.assertAlmostEqual(chain.q(1), 0.1)
        self.assertAlmostEqual(chain.q(50), 0.1)
        self.assertAlmostEqual(chain.p(1) + chain.q(1), 23 / 30)
        self.assertEqual(chain.p(0), 0)
        self.assertEqual(chain.q(0), 0)
        self.assertFalse(chain.degenerate)

    def test_niceness_witnesses(self):
        chain = dominating_chain(SPEC)
        for m in range(1, 500):
            self.assertLessEqual(chain.p(m), chain.C / m + 1e-15)
            self.assertGreaterEqual(chain.q(m), chain.D)
            self.assertLessEqual(chain.p(m) + chain.q(m), 1)

    def test_degenerate_without_individual_events(self):
        chain = dominating_chain(ModelSpec(alpha0=1, alpha1=1))
        self.assertTrue(chain.degenerate)
        self.assertEqual(chain.p(3), 0)

    def test_requirements(self):
        with self.assertRaises(RequiresInterspecific):
            dominating_chain(ModelSpec(alpha0=1, beta=1))
        with self.assertRaises(RequiresNoIntra):
            dominating_chain(ModelSpec(alpha0=1, alpha1=1, gamma0=0.1))


class TabulatedChainTestCase(SimpleTestCase):
    def test_witnesses_and_extrapolation(self):
        chain = tabulated_chain([0, 0.5, 0.3, 0.2], [0, 0.2, 0.3, 0.4])
        self.assertAlmostEqual(chain.C, 0.6)
        self.assertAlmostEqual(chain.D, 0.2)
        self.assertAlmostEqual(chain.p(6), 0.1)
        self.assertAlmostEqual(chain.q(6), 0.2)
        self.assertFalse(chain.degenerate)

    def test_malformed_tables(self):
        with self.assertRaises(InvalidInput):
            tabulated_chain([0, 0.9], [0, 0.2])
        with self.assertRaises(InvalidInput):
            tabulated_chain([0.1, 0.2], [0, 0.2])
        with self.assertRaises(InvalidInput):
            tabulated_chain([0, 0.2], [0, 0.2, 0.3])

    def test_zero_entry_flagged(self):
        self.assertTrue(tabulated_chain([0, 0.0, 0.3], [0, 0.5, 0.5]).degenerate)


class RunNiceChainTestCase(SimpleTestCase):
    def test_absorbing_start(self):
        run = run_nice_chain(dominating_chain(SPEC), 0, trial_rng(0, 0, 0))
        self.assertEqual((run.extinction_time, run.births, run.censored), (0, 0, False))

    def test_bookkeeping(self):
        logger.info('Testing nice-chain bookkeeping...')
        chain = dominating_chain(FAST)
        for trial in range(50):
            run = run_nice_chain(chain, 20, trial_rng(1, 0, trial))
            self.assertFalse(run.censored)
            # every birth is matched by a death, plus the initial 20 deaths
            self.assertGreaterEqual(run.extinction_time, 20 + 2 * run.births)
            self.assertGreaterEqual(run.max_state, 20)

    def test_cap_censors(self):
        run = run_nice_chain(dominating_chain(SPEC), 100, trial_rng(1, 0, 0), cap=10)
        self.assertTrue(run.censored)
        self.assertEqual(run.extinction_time, 10)

    def test_pure_death_chain(self):
        chain = tabulated_chain([0, 0, 0], [0, 1, 1])
        run = run_nice_chain(chain, 7, trial_rng(2, 0, 0))
        self.assertEqual((run.extinction_time, run.births), (7, 0))

    def test_mean_extinction_time_linear(self):
        logger.info('Testing linear growth of the mean extinction time...')
        chain = dominating_chain(FAST)
        small = nice_chain_statistics(chain, 64, trials=400, seed=3, cell=64)
        large = nice_chain_statistics(chain, 128, trials=400, seed=3, cell=128)
        ratio = large['mean_E'] / small['mean_E']
        self.assertGreater(ratio, 1.6)
        self.assertLess(ratio, 2.4)
        self.assertEqual(small['censored'], 0)

    def test_mean_births_logarithmic(self):
        chain = dominating_chain(FAST)
        small = nice_chain_statistics(chain, 32, trials=400, seed=4, cell=32)
        large = nice_chain_statistics(chain, 512, trials=400, seed=4, cell=512)
        c = small['mean_B'] / math.log(32)
        self.assertLessEqual(large['mean_B'], 3 * c * math.log(512))

    def test_statistics_independent_of_thread_count(self):
        chain = dominating_chain(FAST)
        serial = nice_chain_statistics(chain, 16, trials=40, seed=9)
        parallel = nice_chain_statistics(chain, 16, trials=40, seed=9, threads=2)
        self.assertEqual(serial, parallel)

    def test_tail_fractions_decay(self):
        logger.info('Testing the tail fractions of E and B...')
        chain = dominating_chain(FAST)
        base = nice_chain_statistics(chain, 64, trials=300, seed=6, cell=64)
        self.assertIsNone(base['E_tail_fraction'])
        self.assertIsNone(base['B_tail_fraction'])
        e_scale = base['mean_E'] / 64
        b_scale = base['mean_B'] / math.log(64) ** 2
        fractions = []
        for factor in (0, 0.5, 1, 2, 3, 1000):
            row = nice_chain_statistics(
                chain, 64, trials=300, seed=6, cell=64,
                theta_star=factor * e_scale, c_star=factor * b_scale,
            )
            fractions.append((row['E_tail_fraction'], row['B_tail_fraction']))
        for earlier, later in zip(fractions, fractions[1:]):
            self.assertLessEqual(later[0], earlier[0])
            self.assertLessEqual(later[1], earlier[1])
        self.assertEqual(fractions[0][0], 1.0)
        self.assertEqual(fractions[-1], (0.0, 0.0))
        # at three times the sample mean at most a third of the runs remain
        self.assertLessEqual(fractions[4][0], 1 / 3)
        self.assertLessEqual(fractions[4][1], 1 / 3)
