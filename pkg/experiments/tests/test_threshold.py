import logging
logger = logging.getLogger(__name__)

from unittest.mock import patch

from django.test import SimpleTestCase

from chains.domain import ModelSpec
from chains.exceptions import InvalidInput, NotBracketed
from experiments.domain import Estimate
from experiments.services.threshold import find_threshold

SD_HARMONIC = ModelSpec(alpha0=0.5, alpha1=0.5, gamma0=1, gamma1=1)
NEUTRAL_DRIFT = ModelSpec(beta=1, delta=1)


class FindThresholdTestCase(SimpleTestCase):
    def test_bisection(self):
        logger.info('Testing the threshold search on a harmonic chain...')
        # rho ~ (n + delta0) / (2n); only delta0 = n - 1, i.e. (40, 0), reaches 0.975
        result = find_threshold(SD_HARMONIC, 40, 0.975, seed=3, trials_per_probe=400)
        self.assertEqual(result.delta_star, 39)
        deltas = [probe.delta0 for probe in result.probes]
        self.assertEqual(deltas, sorted(deltas))
        self.assertIn(1, deltas)
        self.assertIn(39, deltas)
        self.assertIn(38, deltas)
        self.assertTrue(all(probe.passed == (probe.delta0 == 39) for probe in result.probes))
        self.assertEqual(result.monotonicity_violations, [])

    def test_easy_target(self):
        result = find_threshold(SD_HARMONIC, 6, 0.51, seed=0, trials_per_probe=50)
        self.assertGreaterEqual(result.delta_star, 1)
        self.assertLessEqual(result.delta_star, 5)
        self.assertTrue(result.probes[-1].passed)

    def test_probe_cells_are_delta0(self):
        first = find_threshold(SD_HARMONIC, 20, 0.975, seed=9, trials_per_probe=200)
        second = find_threshold(SD_HARMONIC, 20, 0.975, seed=9, trials_per_probe=200)
        self.assertEqual(first.to_dict(), second.to_dict())

    def test_consensus_start_is_exact(self):
        logger.info('Testing the threshold at the consensus start (n, 0)...')
        # (100, 0) is already won, (99, 1) is not won often enough for a 300-trial interval
        result = find_threshold(SD_HARMONIC, 100, 0.99, seed=4, trials_per_probe=300)
        self.assertEqual(result.delta_star, 99)
        top = result.probes[-1]
        self.assertEqual(top.delta0, 99)
        self.assertEqual((top.estimate.ci_low, top.estimate.ci_high), (1.0, 1.0))
        self.assertFalse(any(probe.passed for probe in result.probes[:-1]))

    def test_not_bracketed(self):
        missed = Estimate(
            trials=10, wins=5, minority_wins=5, both_extinct=0, censored=0, confidence=0.99,
            rho_hat=0.5, ci_low=0.2, ci_high=0.8,
        )
        with patch('experiments.services.threshold.estimate_rho', return_value=missed):
            with self.assertRaises(NotBracketed):
                find_threshold(NEUTRAL_DRIFT, 10, 0.99, seed=0, trials_per_probe=10)

    def test_invalid_arguments(self):
        for target in (0.5, 1.0, 0.2):
            with self.assertRaises(InvalidInput):
                find_threshold(SD_HARMONIC, 10, target, seed=0, trials_per_probe=10)
        with self.assertRaises(InvalidInput):
            find_threshold(SD_HARMONIC, 1, 0.9, seed=0, trials_per_probe=10)
