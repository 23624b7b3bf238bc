# experiments/management/commands/sweep.py

from experiments.domain import GapRule, SweepPlan
from experiments.management.base import ExperimentCommand, parse_int_list
from experiments.models import RunKinds
from experiments.services.sweep import SWEEP_COLUMNS, sweep, sweep_json


class Command(ExperimentCommand):
    help = 'Estimate rho over a list of population sizes with delta0 from a gap rule'
    kind = RunKinds.SWEEP

    def add_command_arguments(self, parser):
        parser.add_argument('--ns', type=str, default='256,1024,4096,16384', help='Comma-separated population sizes')
        parser.add_argument('--gap-rule', type=str, default='log_squared:1',
                            help='kind:c with kind in fixed, log_squared, sqrt_n_log_n, sqrt_n, sqrt_log_n')
        parser.add_argument('--confidence', type=float, default=None)
        parser.add_argument('--max-steps', type=int, default=None)
        parser.add_argument('--min-rho', type=float, default=None,
                            help='With --assert: every lower interval bound must reach this value')

    def run(self, spec, options):
        plan = SweepPlan(
            spec=spec,
            ns=parse_int_list(options['ns']),
            gap_rule=GapRule.parse(options['gap_rule']),
            trials=options['trials'] or 10 ** 4,
            seed=options['seed'],
            confidence=options['confidence'] or self.lv('CONFIDENCE'),
            threads=options['threads'],
            max_steps=options['max_steps'],
        )
        plan.validate()
        return {'gap_rule': str(plan.gap_rule), 'rows': sweep_json(sweep(plan))}

    def table(self, payload):
        return SWEEP_COLUMNS, [[row[column] for column in SWEEP_COLUMNS] for row in payload['rows']]

    def check(self, payload, options):
        failures = [f"n={row['n']}: {row['error']}" for row in payload['rows'] if row['error']]
        minimum = options['min_rho']
        if minimum is not None:
            failures.extend(
                f"n={row['n']}: ci_low {row['ci_low']:.6f} < {minimum}"
                for row in payload['rows'] if not row['error'] and row['ci_low'] < minimum
            )
        return failures
