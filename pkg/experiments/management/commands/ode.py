# experiments/management/commands/ode.py

from experiments.management.base import ExperimentCommand
from experiments.models import RunKinds
from experiments.services.ode import ode_coefficients, ode_trajectory


class Command(ExperimentCommand):
    help = 'Integrate the deterministic Lotka-Volterra comparison model'
    kind = RunKinds.ODE

    def add_command_arguments(self, parser):
        parser.add_argument('--x0', type=float, required=True, help='Initial density of species 0')
        parser.add_argument('--x1', type=float, required=True, help='Initial density of species 1')
        parser.add_argument('--dt', type=float, default=0.01, help='Report interval')
        parser.add_argument('--horizon', type=float, default=10.0, help='End time')

    def run(self, spec, options):
        trajectory = ode_trajectory(
            spec, options['x0'], options['x1'], options['dt'], options['horizon'],
            rel_tol=self.lv('ODE_RELATIVE_TOLERANCE'),
            max_halvings=self.lv('ODE_MAX_HALVINGS'),
            overflow=self.lv('ODE_OVERFLOW_THRESHOLD'),
        )
        r, inter, intra = ode_coefficients(spec)
        payload = trajectory.to_dict()
        payload['coefficients'] = {'r': r, 'inter': inter.tolist(), 'intra': intra.tolist()}
        return payload

    def table(self, payload):
        return ('t', 'x0', 'x1'), zip(payload['times'], payload['x0'], payload['x1'])

    def check(self, payload, options):
        failures = []
        if payload['blew_up']:
            failures.append('The trajectory blew up')
        elif not payload['converged']:
            failures.append('Step halving did not reach the relative tolerance')
        return failures
