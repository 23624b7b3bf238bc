# experiments/management/commands/couple_check.py

from chains.services.coupling import (
    check_domination_premises, coupled_run, coupling_statistics, domination_statistics,
)
from chains.utils import read_trajectory_dump, read_xi_stream, trial_rng
from experiments.management.base import ExperimentCommand, parse_config
from experiments.models import RunKinds
from experiments.utils import coupling_to_dict


class Command(ExperimentCommand):
    help = 'Check the domination premises and run coupled trajectories against the dominating chain'
    kind = RunKinds.COUPLE_CHECK

    def add_command_arguments(self, parser):
        parser.add_argument('--init', type=str, default='50,50', help='Initial configuration x0,x1')
        parser.add_argument('--grid', type=int, default=200, help='Premises are checked for 1 <= a, b <= grid')
        parser.add_argument('--cap', type=int, default=None, help='Step budget per coupled run')
        parser.add_argument('--rule2b-reading', choices=['all_good', 'good_competitive'], default='all_good')
        parser.add_argument('--no-fast-forward', action='store_true',
                            help='Simulate holding steps of the dominating chain one by one')
        parser.add_argument('--xi-file', type=str, default=None,
                            help='Replay one coupled run from this file of xi values (one per line)')
        parser.add_argument('--replay-dump', type=str, default=None,
                            help='With --xi-file: replay the S updates from a simulate trajectory dump')

    def run(self, spec, options):
        init = parse_config(options['init'])
        if options['replay_dump'] and not options['xi_file']:
            raise ValueError('--replay-dump needs --xi-file')
        if options['xi_file']:
            return {'replay': self._replay(spec, init, options)}

        violations = check_domination_premises(
            spec, options['grid'], options['grid'], reading=options['rule2b_reading'],
        )
        summary = coupling_statistics(
            spec, init, options['trials'] or 10 ** 4, options['seed'],
            threads=options['threads'],
            cap=options['cap'],
            rule2b_reading=options['rule2b_reading'],
            fast_forward=not options['no_fast_forward'],
        )
        domination = domination_statistics(
            spec, init, options['trials'] or 10 ** 4, options['seed'], cell=1, threads=options['threads'],
        )
        return {
            'premises': {
                'grid': options['grid'],
                'violations': len(violations),
                'first_violations': violations[:10],
            },
            'coupling': summary,
            'domination': domination,
        }

    def _replay(self, spec, init, options):
        with open(options['xi_file'], encoding='utf-8') as handle:
            xi = read_xi_stream(handle)
        reactions = None
        if options['replay_dump']:
            with open(options['replay_dump'], encoding='utf-8') as handle:
                reactions = [record.reaction for record in read_trajectory_dump(handle)]
        report = coupled_run(
            spec, init, trial_rng(options['seed'], 0, 0),
            cap=options['cap'] or len(xi),
            xi_stream=xi,
            reaction_stream=reactions,
            rule2b_reading=options['rule2b_reading'],
        )
        return coupling_to_dict(report)

    def check(self, payload, options):
        if 'replay' in payload:
            replay = payload['replay']
            return [] if replay['clean'] else ['The replayed run broke domination']
        failures = []
        if payload['premises']['violations']:
            failures.append(f"{payload['premises']['violations']} states break the domination premises")
        coupling = payload['coupling']
        if coupling['dirty_runs']:
            failures.append(
                f"{coupling['dirty_runs']} coupled runs broke domination "
                f"(min violations {coupling['violations_min']}, J violations {coupling['violations_j']})"
            )
        if coupling['censored']:
            failures.append(f"{coupling['censored']} coupled runs hit the step cap; domination is unchecked past it")
        for name in ('T_vs_E', 'J_vs_B'):
            outcome = payload['domination'][name]
            if outcome is None:
                failures.append('Every direct run was censored')
                break
            if not outcome['consistent']:
                failures.append(f"{name}: one-sided KS rejects domination (p={outcome['p_value']:.3g})")
        return failures
