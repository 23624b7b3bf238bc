import logging
logger = logging.getLogger(__name__)

import os
import tempfile
from decimal import Decimal

from django.test import SimpleTestCase

from chains.domain import INTER1, CompetitionMode, Config, ModelSpec
from chains.exceptions import InvalidInput
from chains.serializers import ConfigSerializer, InitialStateSerializer, ModelSpecSerializer
from chains.utils import (
    UniformStream, chunk_bounds, load_spec, mean_and_se, merge_tallies, parse_spec_text,
    read_trajectory_dump, read_xi_stream, trial_rng,
)


class ParseSpecTextTestCase(SimpleTestCase):
    def test_inline_spec(self):
        logger.info('Testing inline spec parsing...')
        raw = parse_spec_text('alpha0=0.5, alpha1=0.5,beta=1,mode=NSD')
        self.assertEqual(raw['alpha0'], Decimal('0.5'))
        self.assertEqual(raw['beta'], Decimal('1'))
        self.assertEqual(raw['mode'], 'nsd')

    def test_yaml_file(self):
        with tempfile.NamedTemporaryFile('w', suffix='.yaml', delete=False) as handle:
            handle.write('alpha0: 0.25\nalpha1: 0.25\ngamma0: 0.5\ngamma1: 0.5\nmode: nsd\n')
        try:
            spec = load_spec(handle.name)
        finally:
            os.unlink(handle.name)
        self.assertEqual(spec, ModelSpec(
            alpha0=0.25, alpha1=0.25, gamma0=0.5, gamma1=0.5, mode=CompetitionMode.NON_SELF_DESTRUCTIVE,
        ))

    def test_unknown_key(self):
        with self.assertRaises(InvalidInput):
            parse_spec_text('alpha0=1,eta=2')

    def test_malformed_items(self):
        with self.assertRaises(InvalidInput):
            parse_spec_text('alpha0')
        with self.assertRaises(InvalidInput):
            parse_spec_text('alpha0=fast')

    def test_load_spec_rejects_negative_rate(self):
        logger.info('Testing spec validation errors...')
        with self.assertRaises(InvalidInput):
            load_spec('alpha0=-0.5')
        with self.assertRaises(InvalidInput):
            load_spec('mode=both')

    def test_defaults(self):
        spec = load_spec('beta=1')
        self.assertEqual(spec.alpha0, 0)
        self.assertEqual(spec.mode, CompetitionMode.SELF_DESTRUCTIVE)


class SerializerTestCase(SimpleTestCase):
    def test_model_spec_round_trip(self):
        spec = ModelSpec(alpha0=0.5, alpha1=0.25, beta=1, delta=2, mode=CompetitionMode.NON_SELF_DESTRUCTIVE)
        serializer = ModelSpecSerializer(data=spec.to_mapping())
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.to_spec(), spec)

    def test_model_spec_errors(self):
        serializer = ModelSpecSerializer(data={'alpha0': '-1'})
        self.assertFalse(serializer.is_valid())
        self.assertIn('rates', serializer.errors)
        serializer = ModelSpecSerializer(data={'alpha0': '1', 'kappa': '2'})
        self.assertFalse(serializer.is_valid())

    def test_config(self):
        serializer = ConfigSerializer(data={'x0': 3, 'x1': 7})
        self.assertTrue(serializer.is_valid())
        self.assertEqual(serializer.to_config(), Config(3, 7))
        self.assertFalse(ConfigSerializer(data={'x0': -1, 'x1': 0}).is_valid())

    def test_initial_state_requires_majority_first(self):
        self.assertFalse(InitialStateSerializer(data={'x0': 3, 'x1': 7}).is_valid())
        self.assertTrue(InitialStateSerializer(data={'x0': 7, 'x1': 7}).is_valid())


class RandomStreamTestCase(SimpleTestCase):
    def test_trial_streams_are_reproducible_and_distinct(self):
        first = trial_rng(5, 1, 2).random(4).tolist()
        self.assertEqual(first, trial_rng(5, 1, 2).random(4).tolist())
        self.assertNotEqual(first, trial_rng(5, 1, 3).random(4).tolist())
        self.assertNotEqual(first, trial_rng(5, 2, 2).random(4).tolist())

    def test_uniform_stream_matches_generator(self):
        stream = UniformStream(trial_rng(1, 0, 0), block=8)
        drawn = [stream.next() for _ in range(20)]
        expected = trial_rng(1, 0, 0).random(24).tolist()[:20]
        self.assertEqual(drawn, expected)


class TallyTestCase(SimpleTestCase):
    def test_chunk_bounds_cover_every_trial(self):
        bounds = chunk_bounds(10, 4)
        self.assertEqual(bounds, [(0, 3), (3, 6), (6, 8), (8, 10)])
        self.assertEqual(chunk_bounds(2, 8), [(0, 1), (1, 2)])

    def test_merge_tallies(self):
        merged = merge_tallies([{'wins': 2, 'trials': 3}, {'wins': 1, 'trials': 4, 'censored': 1}])
        self.assertEqual(merged, {'wins': 3, 'trials': 7, 'censored': 1})
        samples = merge_tallies([{'T': [4, 2], 'runs': 2}, {'T': [7], 'runs': 1}])
        self.assertEqual(samples, {'T': [4, 2, 7], 'runs': 3})

    def test_mean_and_se(self):
        self.assertEqual(mean_and_se(0, 0, 0), (0.0, 0.0))
        mean, se = mean_and_se(6, 14, 3)
        self.assertEqual(mean, 2)
        self.assertAlmostEqual(se, (1 / 3) ** 0.5)


class DumpParsingTestCase(SimpleTestCase):
    def test_read_dump(self):
        lines = ['# step kind x0 x1 dGap tags', '1 inter1 3 2 1 bad_comp', '', '2 death1 3 1 -1 good']
        records = read_trajectory_dump(lines)
        self.assertEqual(len(records), 2)
        self.assertEqual(records[0].reaction, INTER1)
        self.assertEqual(records[1].tags, ('good',))

    def test_malformed_dump(self):
        with self.assertRaises(InvalidInput):
            read_trajectory_dump(['1 teleport 3 2 1 good'])
        with self.assertRaises(InvalidInput):
            read_trajectory_dump(['x inter1 3 2 1 good'])

    def test_xi_stream(self):
        self.assertEqual(read_xi_stream(['# xi', '0.25', '0']), [0.25, 0.0])
        with self.assertRaises(InvalidInput):
            read_xi_stream(['1.0'])
