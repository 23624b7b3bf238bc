# experiments/management/commands/exact.py

from chains.services.exact import exact_mean_consensus_time, exact_rho, grid_rows, ratio_of_counts
from chains.services.kinetics import harmonic_family
from experiments.management.base import ExperimentCommand
from experiments.models import RunKinds
from experiments.utils import grid_to_dict

GRID_COLUMNS = ('a', 'b', 'rho', 'meanT')
RATIO_TOLERANCE = 1e-9


class Command(ExperimentCommand):
    help = 'Solve rho (and optionally the mean consensus time) exactly on a truncated grid'
    kind = RunKinds.EXACT

    def add_command_arguments(self, parser):
        parser.add_argument('--xmax', type=int, default=32, help='Truncation level')
        parser.add_argument('--tol', type=float, default=None, help='Residual tolerance')
        parser.add_argument('--method', choices=['auto', 'direct', 'gauss_seidel'], default='auto')
        parser.add_argument('--with-mean-t', action='store_true', help='Also solve the mean consensus time')
        parser.add_argument('--both-extinct-value', type=float, default=0.0,
                            help='Score of (0,0): 0 counts it as a failure, 0.5 splits it')
        parser.add_argument('--limit', type=int, default=None, help='JSON output keeps a, b <= limit')

    def run(self, spec, options):
        solver = {
            'tol': options['tol'] or self.lv('EXACT_TOLERANCE'),
            'method': options['method'],
            'direct_max_xmax': self.lv('DIRECT_SOLVE_MAX_XMAX'),
            'max_sweeps': self.lv('MAX_SWEEPS'),
        }
        grid = exact_rho(spec, options['xmax'], both_extinct_value=options['both_extinct_value'], **solver)
        if options['with_mean_t']:
            grid.mean_t = exact_mean_consensus_time(spec, options['xmax'], **solver)
        self.grid = grid

        payload = grid_to_dict(grid, limit=options['limit'])
        payload['harmonic_family'] = harmonic_family(spec)
        payload['ratio_error'] = self._ratio_error(spec, grid)
        return payload

    def _ratio_error(self, spec, grid):
        """
        max |rho - a/(a+b)| over 1 <= b <= a <= min(12, xmax) for the harmonic
        families without births or deaths, where the identity is exact on the
        truncated chain. SD needs (0, 0) scored 1/2 for it to hold everywhere.
        """
        family = harmonic_family(spec)
        if family is None or spec.beta or spec.delta:
            return None
        if spec.self_destructive and grid.both_extinct_value != 0.5:
            return None
        top = min(12, grid.xmax)
        return max(
            (abs(grid.rho_at(a, b) - ratio_of_counts(a, b)) for a in range(1, top + 1) for b in range(1, a + 1)),
            default=0.0,
        )

    def table(self, payload):
        return GRID_COLUMNS, grid_rows(self.grid)

    def check(self, payload, options):
        failures = []
        tol = options['tol'] or self.lv('EXACT_TOLERANCE')
        if payload['residual'] > tol:
            failures.append(f"residual {payload['residual']:.3g} exceeds {tol:.3g}")
        error = payload['ratio_error']
        if error is not None and error > RATIO_TOLERANCE:
            failures.append(f"rho differs from a/(a+b) by {error:.3g}")
        return failures
