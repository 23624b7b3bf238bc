# experiments/management/commands/estimate.py

from experiments.domain import SweepRow
from experiments.management.base import ExperimentCommand, parse_config
from experiments.models import RunKinds
from experiments.services.estimation import estimate_rho
from experiments.services.sweep import SWEEP_COLUMNS, sweep_record


class Command(ExperimentCommand):
    help = 'Monte Carlo estimate of rho with a Wilson interval for one initial configuration'
    kind = RunKinds.ESTIMATE

    def add_command_arguments(self, parser):
        parser.add_argument('--init', type=str, required=True, help='Initial configuration x0,x1 (x0 >= x1)')
        parser.add_argument('--cell', type=int, default=0, help='Cell index of the random streams')
        parser.add_argument('--confidence', type=float, default=None, help='Interval level (default from settings)')
        parser.add_argument('--max-steps', type=int, default=None, help='Per-trial step cap')
        parser.add_argument('--expect', type=float, default=None,
                            help='With --assert: the interval must contain this value')

    def run(self, spec, options):
        init = parse_config(options['init'])
        estimate = estimate_rho(
            spec, init, options['trials'] or 10 ** 4, options['seed'],
            cell=options['cell'],
            threads=options['threads'],
            confidence=options['confidence'] or self.lv('CONFIDENCE'),
            max_steps=options['max_steps'],
            censor_warn_fraction=self.lv('CENSOR_WARN_FRACTION'),
        )
        payload = estimate.to_dict()
        payload['init'] = [init.x0, init.x1]
        payload['split_rho'] = estimate.split_rho
        payload['record'] = sweep_record(SweepRow(n=init.n, delta0=init.gap, init=init, estimate=estimate))
        return payload

    def table(self, payload):
        return SWEEP_COLUMNS, [[payload['record'][column] for column in SWEEP_COLUMNS]]

    def check(self, payload, options):
        failures = []
        expect = options['expect']
        if expect is not None and not payload['ci_low'] <= expect <= payload['ci_high']:
            failures.append(
                f"{expect} lies outside the interval [{payload['ci_low']:.6f}, {payload['ci_high']:.6f}]"
            )
        if payload['censored'] > self.lv('CENSOR_WARN_FRACTION') * payload['trials']:
            failures.append(f"{payload['censored']} of {payload['trials']} trials were censored")
        return failures
