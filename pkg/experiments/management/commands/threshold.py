# experiments/management/commands/threshold.py

from experiments.management.base import ExperimentCommand
from experiments.models import RunKinds
from experiments.services.threshold import find_threshold

PROBE_COLUMNS = ('delta0', 'init', 'rho_hat', 'ci_low', 'ci_high', 'passed')


class Command(ExperimentCommand):
    help = 'Bisect for the smallest delta0 whose rho lower bound reaches a target'
    kind = RunKinds.THRESHOLD

    def add_command_arguments(self, parser):
        parser.add_argument('--n', type=int, required=True, help='Population size')
        parser.add_argument('--target', type=float, default=0.99, help='Target lower bound in (0.5, 1)')
        parser.add_argument('--confidence', type=float, default=None)
        parser.add_argument('--max-steps', type=int, default=None)

    def run(self, spec, options):
        result = find_threshold(
            spec, options['n'], options['target'], options['seed'],
            trials_per_probe=options['trials'] or 10 ** 4,
            threads=options['threads'],
            confidence=options['confidence'] or self.lv('CONFIDENCE'),
            max_steps=options['max_steps'],
        )
        return result.to_dict()

    def table(self, payload):
        return PROBE_COLUMNS, [[probe[column] for column in PROBE_COLUMNS] for probe in payload['probes']]

    def check(self, payload, options):
        return [
            f"rho passes at delta0={low} but misses at delta0={high}"
            for low, high in payload['monotonicity_violations']
        ]
