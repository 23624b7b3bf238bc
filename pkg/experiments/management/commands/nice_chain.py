# experiments/management/commands/nice_chain.py

from chains.services.birthdeath import dominating_chain, nice_chain_statistics, tabulated_chain
from experiments.management.base import ExperimentCommand, parse_float_list, parse_int_list
from experiments.models import RunKinds

STAT_COLUMNS = (
    'n0', 'trials', 'censored', 'mean_E', 'se_E', 'mean_B', 'se_B', 'mean_max_state',
    'E_tail_fraction', 'B_tail_fraction',
)


class Command(ExperimentCommand):
    help = 'Extinction time E and birth count B of a nice birth-death chain'
    kind = RunKinds.NICE_CHAIN
    requires_spec = False

    def add_command_arguments(self, parser):
        parser.add_argument('--n0', type=str, default='256,1024,4096,16384', help='Comma-separated start states')
        parser.add_argument('--p-table', type=str, default=None, help='Tabulated p(0), p(1), ... instead of --spec')
        parser.add_argument('--q-table', type=str, default=None, help='Tabulated q(0), q(1), ...')
        parser.add_argument('--cap', type=int, default=None, help='Step cap per run')
        parser.add_argument('--theta-star', type=float, default=None, help='Report Pr[E > theta* n0]')
        parser.add_argument('--c-star', type=float, default=None, help='Report Pr[B > c* log^2 n0]')

    def run(self, spec, options):
        if options['p_table'] or options['q_table']:
            if spec is not None:
                raise ValueError('Give either --spec or --p-table/--q-table, not both')
            chain = tabulated_chain(
                parse_float_list(options['p_table'] or ''), parse_float_list(options['q_table'] or ''),
            )
        elif spec is not None:
            chain = dominating_chain(spec)
        else:
            raise ValueError('nice_chain needs --spec or --p-table and --q-table')

        rows = [
            nice_chain_statistics(
                chain, n0, options['trials'] or 10 ** 4, options['seed'], cell=n0,
                threads=options['threads'], cap=options['cap'],
                theta_star=options['theta_star'], c_star=options['c_star'],
            )
            for n0 in parse_int_list(options['n0'])
        ]
        return {
            'chain': {'canonical': chain.canonical, 'C': chain.C, 'D': chain.D, 'degenerate': chain.degenerate},
            'rows': rows,
        }

    def table(self, payload):
        # tail fractions are blank without --theta-star / --c-star
        return STAT_COLUMNS, [
            ['' if row[column] is None else row[column] for column in STAT_COLUMNS] for row in payload['rows']
        ]

    def check(self, payload, options):
        failures = []
        if payload['chain']['degenerate']:
            failures.append('The chain is degenerate (a zero birth or death probability)')
        failures.extend(
            f"n0={row['n0']}: {row['censored']} runs hit the step cap"
            for row in payload['rows'] if row['censored']
        )
        return failures
