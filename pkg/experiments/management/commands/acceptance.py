# experiments/management/commands/acceptance.py

from dataclasses import asdict

from experiments.management.base import ExperimentCommand, parse_int_list
from experiments.models import RunKinds
from experiments.services.acceptance import CRITERIA, AcceptanceSuite


class Command(ExperimentCommand):
    help = 'Run the numbered acceptance criteria; exits 3 when any of them fails'
    kind = RunKinds.ACCEPTANCE
    requires_spec = False

    def add_command_arguments(self, parser):
        parser.add_argument('--criteria', type=str, default=None,
                            help='Comma-separated criterion numbers (default: all)')
        parser.add_argument('--quick', action='store_true', help='Scaled-down smoke run')

    def run(self, spec, options):
        numbers = parse_int_list(options['criteria']) if options['criteria'] else list(CRITERIA)
        unknown = [number for number in numbers if number not in CRITERIA]
        if unknown:
            raise ValueError(f"Unknown criteria: {unknown}")
        suite = AcceptanceSuite(
            seed=options['seed'], threads=options['threads'], quick=options['quick'],
            confidence=self.lv('CONFIDENCE'), tolerance=self.lv('EXACT_TOLERANCE'),
        )
        results = suite.run(numbers)
        for result in results:
            style = self.style.SUCCESS if result.passed else self.style.ERROR
            self.stderr.write(style(
                f"[{'PASS' if result.passed else 'FAIL'}] {result.number}. {result.title} ({result.elapsed:.1f}s)"
            ))
        return {'quick': options['quick'], 'criteria': [asdict(result) for result in results]}

    def table(self, payload):
        return ('number', 'title', 'passed', 'elapsed'), [
            [row['number'], row['title'], row['passed'], row['elapsed']] for row in payload['criteria']
        ]

    def check(self, payload, options):
        return [
            f"criterion {row['number']} failed: {row['details']}"
            for row in payload['criteria'] if not row['passed']
        ]

    def handle(self, *args, **options):
        # acceptance always asserts
        options['assert_mode'] = True
        super().handle(*args, **options)
