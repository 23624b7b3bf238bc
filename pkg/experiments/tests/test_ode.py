import logging
logger = logging.getLogger(__name__)

import math

from django.test import SimpleTestCase

from chains.domain import CompetitionMode, ModelSpec
from chains.exceptions import InvalidInput
from experiments.services.ode import ode_coefficients, ode_trajectory

NEUTRAL = ModelSpec(alpha0=0.5, alpha1=0.5, beta=1, delta=1)
LOGISTIC = ModelSpec(beta=2, delta=1, gamma0=1, gamma1=1)


class OdeCoefficientsTestCase(SimpleTestCase):
    def test_self_destructive(self):
        r, inter, intra = ode_coefficients(ModelSpec(alpha0=0.25, alpha1=0.5, beta=2, delta=0.5, gamma0=0.125))
        self.assertAlmostEqual(r, 1.5)
        self.assertEqual(inter.tolist(), [0.75, 0.75])
        self.assertEqual(intra.tolist(), [0.125, 0.0])

    def test_non_self_destructive(self):
        spec = ModelSpec(alpha0=0.3, alpha1=0.5, mode=CompetitionMode.NON_SELF_DESTRUCTIVE)
        _, inter, _ = ode_coefficients(spec)
        # species 0 dies in the reaction with rate alpha1
        self.assertEqual(inter.tolist(), [0.5, 0.3])


class OdeTrajectoryTestCase(SimpleTestCase):
    def test_logistic_closed_form(self):
        logger.info('Testing the ODE integrator against the logistic solution...')
        trajectory = ode_trajectory(LOGISTIC, 0.1, 0.0, dt=0.1, horizon=5.0)
        self.assertTrue(trajectory.converged)
        self.assertFalse(trajectory.blew_up)
        self.assertEqual(len(trajectory.times), 51)
        for t, x0 in zip(trajectory.times, trajectory.x0):
            expected = 1 / (1 + 9 * math.exp(-t))
            self.assertAlmostEqual(x0, expected, places=6)
        self.assertTrue(all(x1 == 0 for x1 in trajectory.x1))

    def test_symmetric_start_stays_symmetric(self):
        trajectory = ode_trajectory(NEUTRAL, 2.0, 2.0, dt=0.05, horizon=2.0)
        for x0, x1 in zip(trajectory.x0, trajectory.x1):
            self.assertAlmostEqual(x0, x1, places=12)

    def test_majority_keeps_its_lead(self):
        trajectory = ode_trajectory(NEUTRAL, 3.0, 1.0, dt=0.1, horizon=10.0)
        self.assertTrue(all(x0 > x1 >= 0 for x0, x1 in zip(trajectory.x0, trajectory.x1)))
        self.assertLess(trajectory.x1[-1] / trajectory.x0[-1], 1 / 3)

    def test_blow_up(self):
        logger.info('Testing ODE blow-up detection...')
        trajectory = ode_trajectory(ModelSpec(beta=5), 1.0, 1.0, dt=1.0, horizon=20.0, overflow=1e6)
        self.assertTrue(trajectory.blew_up)
        self.assertFalse(trajectory.converged)
        self.assertLess(trajectory.times[-1], 20.0)
        self.assertLessEqual(max(trajectory.x0), 1e6)

    def test_invalid_arguments(self):
        with self.assertRaises(InvalidInput):
            ode_trajectory(NEUTRAL, 1.0, 1.0, dt=0, horizon=1.0)
        with self.assertRaises(InvalidInput):
            ode_trajectory(NEUTRAL, 1.0, 1.0, dt=0.1, horizon=-1.0)
        with self.assertRaises(InvalidInput):
            ode_trajectory(NEUTRAL, -1.0, 1.0, dt=0.1, horizon=1.0)
        with self.assertRaises(InvalidInput):
            ode_trajectory(ModelSpec(beta=-1), 1.0, 1.0, dt=0.1, horizon=1.0)
