import logging
logger = logging.getLogger(__name__)

import math

from django.test import SimpleTestCase

from chains.domain import (
    BIRTH0, BIRTH1, DEATH0, DEATH1, INTER0, INTER1, INTRA0, INTRA1, MAX_COUNT,
    CompetitionMode, Config, ConsensusState, EventFamily, EventTag, ModelSpec,
)
from chains.exceptions import (
    CountOverflow, InfeasibleReaction, NegativeRate, NonFiniteRate, ZeroPropensity,
)
from chains.services.birthdeath import dominating_chain
from chains.services.kinetics import (
    apply_reaction, classify, consensus_state, harmonic_family, prob_bad_competitive,
    prob_bad_noncomp, prob_good, prob_good_competitive, prob_other, propensities,
    total_propensity, validate_spec,
)

SD = CompetitionMode.SELF_DESTRUCTIVE
NSD = CompetitionMode.NON_SELF_DESTRUCTIVE
BASE = ModelSpec(alpha0=0.5, alpha1=0.5, beta=1, delta=1)


class ValidateSpecTestCase(SimpleTestCase):
    def test_all_zero_rates_accepted(self):
        logger.info('Testing the all-zero spec...')
        derived = validate_spec(ModelSpec())
        self.assertEqual(derived['theta'], 0)
        self.assertTrue(derived['neutral'])

    def test_negative_rate_rejected(self):
        with self.assertRaises(NegativeRate):
            validate_spec(ModelSpec(alpha0=-1))

    def test_non_finite_rate_rejected(self):
        with self.assertRaises(NonFiniteRate):
            validate_spec(ModelSpec(beta=math.inf))
        with self.assertRaises(NonFiniteRate):
            validate_spec(ModelSpec(delta=math.nan))

    def test_derived_quantities(self):
        logger.info('Testing derived quantities...')
        derived = validate_spec(BASE)
        self.assertTrue(derived['neutral'])
        self.assertEqual(derived['theta'], 2)
        self.assertEqual(derived['alpha'], 1)
        self.assertEqual(derived['alpha_min'], 0.5)
        self.assertFalse(validate_spec(ModelSpec(alpha0=1, alpha1=0.5))['neutral'])


class PropensityTestCase(SimpleTestCase):
    def test_total_propensity_example(self):
        logger.info('Testing phi at (2,3)...')
        rates = propensities(BASE, Config(2, 3))
        self.assertEqual(sum(rate for _, rate in rates), 16)
        self.assertEqual(total_propensity(BASE, Config(2, 3)), 16)

    def test_empty_state_has_no_reactions(self):
        self.assertEqual(propensities(BASE, Config(0, 0)), [])

    def test_single_intra_reaction(self):
        rates = propensities(ModelSpec(gamma0=1), Config(3, 0))
        self.assertEqual(rates, [(INTRA0, 3.0)])

    def test_sum_matches_closed_form(self):
        logger.info('Testing propensity consistency over a grid of states...')
        spec = ModelSpec(alpha0=0.3, alpha1=0.7, beta=1.1, delta=0.9, gamma0=0.2, gamma1=0.4)
        for x0 in (0, 1, 2, 17, 1000, 10 ** 6):
            for x1 in (0, 1, 5, 999, 10 ** 6):
                c = Config(x0, x1)
                total = sum(rate for _, rate in propensities(spec, c))
                expected = total_propensity(spec, c)
                self.assertLessEqual(abs(total - expected), 1e-12 * max(expected, 1.0))

    def test_count_overflow_reported(self):
        with self.assertRaises(CountOverflow):
            propensities(BASE, Config(MAX_COUNT + 1, 1))


class ApplyReactionTestCase(SimpleTestCase):
    def test_sd_interspecific_removes_both(self):
        self.assertEqual(apply_reaction(BASE, Config(1, 1), INTER0), Config(0, 0))

    def test_nsd_interspecific_keeps_reactant_species(self):
        spec = ModelSpec(alpha0=0.5, alpha1=0.5, mode=NSD)
        self.assertEqual(apply_reaction(spec, Config(4, 2), INTER1), Config(3, 2))
        self.assertEqual(apply_reaction(spec, Config(4, 2), INTER0), Config(4, 1))

    def test_sd_intraspecific_removes_two(self):
        spec = ModelSpec(gamma0=1)
        self.assertEqual(apply_reaction(spec, Config(5, 3), INTRA0), Config(3, 3))

    def test_infeasible_reaction(self):
        logger.info('Testing infeasible reactions...')
        with self.assertRaises(InfeasibleReaction):
            apply_reaction(BASE, Config(0, 3), DEATH0)
        with self.assertRaises(InfeasibleReaction):
            apply_reaction(ModelSpec(gamma0=1), Config(1, 3), INTRA0)

    def test_counts_never_negative(self):
        spec = ModelSpec(alpha0=1, alpha1=1, beta=1, delta=1, gamma0=1, gamma1=1)
        for mode in (SD, NSD):
            spec = ModelSpec(**{**spec.rates(), 'mode': mode})
            for x0 in range(0, 5):
                for x1 in range(0, 5):
                    for kind, _ in propensities(spec, Config(x0, x1)):
                        after = apply_reaction(spec, Config(x0, x1), kind)
                        self.assertGreaterEqual(min(after.x0, after.x1), 0)


class ConsensusStateTestCase(SimpleTestCase):
    def test_states(self):
        self.assertEqual(consensus_state(Config(3, 0)), ConsensusState.WINNER_0)
        self.assertEqual(consensus_state(Config(0, 4)), ConsensusState.WINNER_1)
        self.assertEqual(consensus_state(Config(0, 0)), ConsensusState.BOTH_EXTINCT)
        self.assertEqual(consensus_state(Config(2, 5)), ConsensusState.NOT_REACHED)


class ClassifyTestCase(SimpleTestCase):
    def test_sd_interspecific_is_good_and_gap_neutral(self):
        logger.info('Testing classification of an SD interspecific event...')
        event = classify(BASE, Config(4, 2), INTER0)
        self.assertEqual(event.family, EventFamily.COMPETITIVE)
        self.assertEqual(event.d_gap_initial, 0)
        self.assertEqual(event.tags, frozenset({EventTag.GOOD}))

    def test_nsd_majority_death_is_bad_competitive(self):
        spec = ModelSpec(alpha0=0.5, alpha1=0.5, mode=NSD)
        event = classify(spec, Config(4, 2), INTER1)
        self.assertEqual(event.family, EventFamily.COMPETITIVE)
        self.assertEqual(event.d_gap_initial, 1)
        self.assertEqual(event.tags, frozenset({EventTag.BAD_COMPETITIVE}))

    def test_majority_death_is_bad_noncompetitive(self):
        event = classify(BASE, Config(4, 2), DEATH0)
        self.assertEqual(event.family, EventFamily.INDIVIDUAL)
        self.assertEqual(event.d_gap_initial, 1)
        self.assertTrue(event.is_bad_noncompetitive)

    def test_majority_birth_is_neutral(self):
        event = classify(BASE, Config(4, 2), BIRTH0)
        self.assertEqual(event.tags, frozenset({EventTag.NEUTRAL}))
        self.assertEqual(event.d_gap_initial, -1)

    def test_tie_labels_species_one_as_minimum(self):
        logger.info('Testing tie labelling...')
        self.assertTrue(classify(BASE, Config(3, 3), DEATH1).is_good)
        self.assertTrue(classify(BASE, Config(3, 3), DEATH0).is_bad_noncompetitive)
        self.assertTrue(classify(BASE, Config(3, 3), BIRTH1).is_bad_noncompetitive)
        self.assertEqual(classify(BASE, Config(3, 3), BIRTH0).tags, frozenset({EventTag.NEUTRAL}))

    def test_sd_intra_changes_gap_by_two(self):
        spec = ModelSpec(gamma0=1, gamma1=1)
        self.assertEqual(classify(spec, Config(5, 3), INTRA0).d_gap_initial, 2)
        self.assertEqual(classify(spec, Config(5, 3), INTRA1).d_gap_initial, -2)

    def test_sd_interspecific_always_gap_neutral(self):
        spec = ModelSpec(alpha0=1, alpha1=0.25)
        for x0 in range(1, 8):
            for x1 in range(1, 8):
                for kind in (INTER0, INTER1):
                    self.assertEqual(classify(spec, Config(x0, x1), kind).d_gap_initial, 0)


class EventProbabilityTestCase(SimpleTestCase):
    def test_bad_noncompetitive_example(self):
        logger.info('Testing P(2,1)...')
        self.assertAlmostEqual(prob_bad_noncomp(BASE, Config(2, 1)), 3 / 8, places=14)

    def test_good_examples(self):
        self.assertAlmostEqual(prob_good(BASE, Config(2, 1)), 3 / 8, places=14)
        self.assertGreaterEqual(prob_good(BASE, Config(2, 1)), dominating_chain(BASE).q(1))
        nsd = ModelSpec(**{**BASE.rates(), 'mode': NSD})
        self.assertAlmostEqual(prob_good(nsd, Config(2, 1)), 2 / 8, places=14)

    def test_no_individual_reactions(self):
        spec = ModelSpec(alpha0=1, alpha1=2)
        for c in (Config(1, 1), Config(3, 2), Config(2, 7)):
            self.assertEqual(prob_bad_noncomp(spec, c), 0)

    def test_pure_births_never_good(self):
        self.assertEqual(prob_good(ModelSpec(beta=1), Config(3, 2)), 0)

    def test_tie_numerator(self):
        spec = ModelSpec(alpha0=0.5, alpha1=0.5, beta=2, delta=3)
        phi = total_propensity(spec, Config(1, 1))
        self.assertAlmostEqual(prob_bad_noncomp(spec, Config(1, 1)), (3 + 2) / phi, places=14)

    def test_closed_forms_for_majority_first(self):
        logger.info('Testing P and Q closed forms...')
        for mode in (SD, NSD):
            spec = ModelSpec(alpha0=0.3, alpha1=0.9, beta=1.5, delta=0.7, mode=mode)
            for a in range(1, 12):
                for b in range(1, a + 1):
                    phi = spec.alpha * a * b + spec.theta * (a + b)
                    P = (spec.delta * a + spec.beta * b) / phi
                    competitive = spec.alpha if mode == SD else spec.alpha0
                    Q = (competitive * a * b + spec.delta * b) / phi
                    self.assertAlmostEqual(prob_bad_noncomp(spec, Config(a, b)), P, places=12)
                    self.assertAlmostEqual(prob_good(spec, Config(a, b)), Q, places=12)

    def test_partition_sums_to_one(self):
        spec = ModelSpec(alpha0=0.2, alpha1=1.3, beta=0.4, delta=2.0, gamma0=0.5, gamma1=0.1)
        for mode in (SD, NSD):
            spec = ModelSpec(**{**spec.rates(), 'mode': mode})
            for a in range(0, 9):
                for b in range(0, 9):
                    if total_propensity(spec, Config(a, b)) == 0:
                        continue
                    c = Config(a, b)
                    total = prob_bad_noncomp(spec, c) + prob_good(spec, c) + prob_other(spec, c)
                    self.assertLess(abs(total - 1), 1e-12)
                    self.assertLessEqual(prob_bad_competitive(spec, c), prob_other(spec, c) + 1e-15)
                    self.assertLessEqual(prob_good_competitive(spec, c), prob_good(spec, c) + 1e-15)

    def test_zero_propensity(self):
        with self.assertRaises(ZeroPropensity):
            prob_good(BASE, Config(0, 0))


class HarmonicFamilyTestCase(SimpleTestCase):
    def test_families(self):
        self.assertEqual(
            harmonic_family(ModelSpec(alpha0=0.5, alpha1=0.5, gamma0=1, gamma1=1)),
            'sd_alpha_equals_gamma',
        )
        self.assertEqual(
            harmonic_family(ModelSpec(alpha0=0.25, alpha1=0.25, gamma0=0.5, gamma1=0.5, mode=NSD)),
            'nsd_gamma_equals_two_alpha',
        )
        self.assertIsNone(harmonic_family(ModelSpec(alpha0=0.5, alpha1=0.5, gamma0=0.5, gamma1=0.5)))
        self.assertIsNone(harmonic_family(BASE))
