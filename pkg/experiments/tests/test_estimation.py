import logging
logger = logging.getLogger(__name__)

import math

from django.test import SimpleTestCase

from chains.domain import Config, ModelSpec
from chains.exceptions import InvalidInput, ZeroTrials
from chains.services.exact import exact_rho
from experiments.domain import Estimate
from experiments.services.estimation import estimate_rho, wilson_interval

# a/(a+b) solves the recurrence when (0, 0) is scored 1/2
SD_HARMONIC = ModelSpec(alpha0=0.5, alpha1=0.5, gamma0=1, gamma1=1)
FAST = ModelSpec(alpha0=1, alpha1=1, beta=0.25, delta=0.25)


class WilsonIntervalTestCase(SimpleTestCase):
    def test_textbook_value(self):
        logger.info('Testing the Wilson interval against a textbook value...')
        low, high = wilson_interval(50, 100, confidence=0.95)
        self.assertAlmostEqual(low, 0.4038, places=3)
        self.assertAlmostEqual(high, 0.5962, places=3)

    def test_edges(self):
        self.assertEqual(wilson_interval(0, 0), (0.0, 1.0))
        low, high = wilson_interval(100, 100)
        self.assertEqual(high, 1.0)
        self.assertGreater(low, 0.9)
        low, high = wilson_interval(0, 100)
        self.assertEqual(low, 0.0)
        self.assertLess(high, 0.1)

    def test_symmetry(self):
        low, high = wilson_interval(30, 200)
        mirror_low, mirror_high = wilson_interval(170, 200)
        self.assertAlmostEqual(low, 1 - mirror_high)
        self.assertAlmostEqual(high, 1 - mirror_low)

    def test_wider_at_higher_confidence(self):
        narrow = wilson_interval(60, 100, confidence=0.9)
        wide = wilson_interval(60, 100, confidence=0.999)
        self.assertLess(wide[0], narrow[0])
        self.assertGreater(wide[1], narrow[1])

    def test_invalid_confidence(self):
        with self.assertRaises(InvalidInput):
            wilson_interval(1, 2, confidence=1.0)


class EstimateTestCase(SimpleTestCase):
    def make(self, **overrides):
        values = dict(
            trials=100, wins=70, minority_wins=10, both_extinct=10, censored=10, confidence=0.99,
            rho_hat=70 / 90, ci_low=0.6, ci_high=0.9, hit_tie=30, tie_failures=12,
        )
        values.update(overrides)
        return Estimate(**values)

    def test_derived_frequencies(self):
        logger.info('Testing Estimate derived properties...')
        estimate = self.make()
        self.assertEqual(estimate.effective_trials, 90)
        self.assertAlmostEqual(estimate.hit_tie_freq, 30 / 90)
        self.assertAlmostEqual(estimate.split_rho, 75 / 90)
        self.assertGreater(estimate.split_rho_se, 0)

    def test_tie_gap(self):
        estimate = self.make()
        mean, se = estimate.tie_gap()
        self.assertAlmostEqual(mean, 20 / 90 - 15 / 90)
        # per-trial value: fail - tie / 2
        values = [0.5] * 12 + [-0.5] * 18 + [1.0] * 8 + [0.0] * 52
        self.assertEqual(len(values), 90)
        sample_mean = sum(values) / 90
        variance = sum((v - sample_mean) ** 2 for v in values) / 89
        self.assertAlmostEqual(mean, sample_mean)
        self.assertAlmostEqual(se, math.sqrt(variance / 90))

    def test_no_effective_trials(self):
        estimate = self.make(censored=100, wins=0, minority_wins=0, both_extinct=0, hit_tie=0, tie_failures=0)
        self.assertEqual(estimate.hit_tie_freq, 0.0)
        self.assertEqual(estimate.split_rho, 0.0)
        self.assertEqual(estimate.tie_gap(), (0.0, 0.0))

    def test_to_dict(self):
        data = self.make().to_dict()
        self.assertEqual(data['effective_trials'], 90)
        self.assertIn('hit_tie_freq', data)


class EstimateRhoTestCase(SimpleTestCase):
    def test_matches_exact_oracle(self):
        logger.info('Testing estimate_rho against the exact oracle at (6,4)...')
        estimate = estimate_rho(SD_HARMONIC, Config(6, 4), 3000, seed=11)
        oracle = exact_rho(SD_HARMONIC, 16).rho_at(6, 4)
        self.assertEqual(estimate.trials, 3000)
        self.assertEqual(estimate.censored, 0)
        self.assertEqual(estimate.wins + estimate.minority_wins + estimate.both_extinct, 3000)
        self.assertLessEqual(estimate.ci_low, oracle)
        self.assertLessEqual(oracle, estimate.ci_high)
        self.assertLess(abs(estimate.split_rho - 0.6), 4.5 * estimate.split_rho_se)

    def test_measures(self):
        estimate = estimate_rho(FAST, Config(8, 4), 300, seed=2)
        means = estimate.means
        self.assertAlmostEqual(means['T'], means['I'] + means['K'])
        self.assertLessEqual(means['J'], means['I'])
        self.assertGreaterEqual(means['max_total'], 12)
        self.assertTrue(all(value >= 0 for value in estimate.std_errors.values()))

    def test_independent_of_thread_count(self):
        logger.info('Testing that estimates do not depend on the worker count...')
        single = estimate_rho(FAST, Config(7, 5), 240, seed=5, cell=3, threads=1)
        pooled = estimate_rho(FAST, Config(7, 5), 240, seed=5, cell=3, threads=3)
        self.assertEqual(single, pooled)

    def test_cells_draw_different_streams(self):
        first = estimate_rho(FAST, Config(7, 5), 200, seed=5, cell=0)
        second = estimate_rho(FAST, Config(7, 5), 200, seed=5, cell=1)
        self.assertNotEqual(first.means, second.means)

    def test_consensus_start(self):
        estimate = estimate_rho(FAST, Config(5, 0), 10, seed=0)
        self.assertEqual(estimate.wins, 10)
        self.assertEqual(estimate.rho_hat, 1.0)
        self.assertEqual(estimate.means['T'], 0)
        self.assertEqual((estimate.ci_low, estimate.ci_high), (1.0, 1.0))
        empty = estimate_rho(FAST, Config(0, 0), 300, seed=0)
        self.assertEqual(empty.both_extinct, 300)
        self.assertEqual((empty.rho_hat, empty.ci_low, empty.ci_high), (0.0, 0.0, 0.0))

    def test_all_censored(self):
        estimate = estimate_rho(FAST, Config(30, 20), 20, seed=0, max_steps=1)
        self.assertEqual(estimate.censored, 20)
        self.assertEqual(estimate.rho_hat, 0.0)
        self.assertEqual((estimate.ci_low, estimate.ci_high), (0.0, 1.0))

    def test_invalid_arguments(self):
        with self.assertRaises(ZeroTrials):
            estimate_rho(FAST, Config(5, 3), 0, seed=0)
        with self.assertRaises(InvalidInput):
            estimate_rho(FAST, Config(3, 5), 10, seed=0)
        with self.assertRaises(InvalidInput):
            estimate_rho(ModelSpec(alpha0=-1), Config(5, 3), 10, seed=0)
