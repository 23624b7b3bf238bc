# experiments/management/commands/simulate.py

from chains.services.simulation import gillespie_run, run_to_consensus
from chains.utils import trajectory_writer, trial_rng
from experiments.management.base import ExperimentCommand, parse_config
from experiments.models import RunKinds
from experiments.utils import gillespie_to_dict, stats_to_dict


class Command(ExperimentCommand):
    help = 'Run a single trajectory to consensus (or to extinction of both species with --gillespie)'
    kind = RunKinds.SIMULATE

    def add_command_arguments(self, parser):
        parser.add_argument('--init', type=str, required=True, help='Initial configuration x0,x1 (x0 >= x1)')
        parser.add_argument('--trial', type=int, default=0, help='Trial index of the random stream')
        parser.add_argument('--max-steps', type=int, default=None, help='Step (event) cap')
        parser.add_argument('--gillespie', action='store_true', help='Continuous-time run with extinction times')
        parser.add_argument('--dump', type=str, default=None,
                            help='Write the event-by-event trajectory to this path (jump chain only)')

    def run(self, spec, options):
        init = parse_config(options['init'])
        rng = trial_rng(options['seed'], 0, options['trial'])
        if options['gillespie']:
            if options['dump']:
                raise ValueError('--dump is only available for the jump chain')
            return gillespie_to_dict(gillespie_run(spec, init, rng, max_events=options['max_steps']))
        if options['dump']:
            with open(options['dump'], 'w', encoding='utf-8', newline='') as handle:
                stats = run_to_consensus(
                    spec, init, rng, max_steps=options['max_steps'], on_event=trajectory_writer(handle),
                )
            self.stderr.write(self.style.SUCCESS(f"Trajectory written to {options['dump']}"))
        else:
            stats = run_to_consensus(spec, init, rng, max_steps=options['max_steps'])
        return stats_to_dict(stats)

    def check(self, payload, options):
        if payload['censored']:
            return ['The run was censored before reaching its end state']
        return []
